//! Ring-buffer experience replay with uniform sampling.

use rand::Rng;

use crate::data::STATE_DIM;
use crate::env::ACTION_DIM;

/// Transition as stored: normalized states, raw executed action, scaled
/// reward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoredTransition {
    pub state: [f64; STATE_DIM],
    pub action: [f64; ACTION_DIM],
    pub reward: f64,
    pub next_state: [f64; STATE_DIM],
    pub done: bool,
}

#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    data: Vec<StoredTransition>,
    capacity: usize,
    /// Next write position; wraps so the oldest entry is evicted first.
    head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "capacity must be positive");
        ReplayBuffer {
            data: Vec::with_capacity(capacity.min(1 << 20)),
            capacity,
            head: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: StoredTransition) {
        if self.data.len() < self.capacity {
            self.data.push(t);
        } else {
            self.data[self.head] = t;
        }
        self.head = (self.head + 1) % self.capacity;
    }

    pub fn get(&self, index: usize) -> &StoredTransition {
        &self.data[index]
    }

    /// Uniform sample of `batch` indices (with replacement).
    pub fn sample_indices<R: Rng>(&self, rng: &mut R, batch: usize) -> Vec<usize> {
        assert!(
            self.data.len() >= batch,
            "cannot sample {batch} from {}",
            self.data.len()
        );
        (0..batch).map(|_| rng.random_range(0..self.data.len())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(tag: f64) -> StoredTransition {
        StoredTransition {
            state: [tag; STATE_DIM],
            action: [tag; ACTION_DIM],
            reward: tag,
            next_state: [tag; STATE_DIM],
            done: false,
        }
    }

    #[test]
    fn holds_exactly_the_last_capacity_entries() {
        let mut buf = ReplayBuffer::new(5);
        for i in 0..12 {
            buf.push(t(i as f64));
        }
        assert_eq!(buf.len(), 5);
        let mut rewards: Vec<f64> = (0..5).map(|i| buf.get(i).reward).collect();
        rewards.sort_by(f64::total_cmp);
        assert_eq!(rewards, vec![7.0, 8.0, 9.0, 10.0, 11.0]);
    }

    #[test]
    fn sampling_hits_every_index_roughly_uniformly() {
        let mut buf = ReplayBuffer::new(16);
        for i in 0..16 {
            buf.push(t(i as f64));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut counts = [0usize; 16];
        let draws = 64_000;
        for idx in buf.sample_indices(&mut rng, draws) {
            counts[idx] += 1;
        }
        // chi-square sanity: 15 dof, expected 4000 per bin; 99.9th pct ~ 37.7
        let expected = draws as f64 / 16.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 40.0, "chi-square {chi2} too large: {counts:?}");
        assert!(counts.iter().all(|&c| c > 0));
    }

    #[test]
    #[should_panic(expected = "cannot sample")]
    fn sampling_requires_enough_entries() {
        let mut buf = ReplayBuffer::new(8);
        buf.push(t(0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let _ = buf.sample_indices(&mut rng, 2);
    }
}
