//! Fully-connected networks with manual reverse-mode gradients.
//!
//! Two fixed shapes are used: the actor (ReLU hidden, tanh output) and the
//! critic (ReLU hidden, linear output). Forward passes cache layer
//! activations; `backward` turns an output-side gradient into parameter
//! gradients plus the input-side gradient, which is what chains the critic's
//! action sensitivity into the actor.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Output-layer activation; hidden layers are always ReLU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputActivation {
    /// Saturating onto [-1, 1] (actor).
    Tanh,
    /// Unbounded (critic).
    Linear,
}

/// Weight bound of the output layer; hidden layers use `1/sqrt(fan_in)`.
const FINAL_LAYER_BOUND: f64 = 3e-3;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    /// Per-layer weights, shape `(out, in)`.
    weights: Vec<Array2<f64>>,
    /// Per-layer biases, shape `(out,)`.
    biases: Vec<Array1<f64>>,
    out_act: OutputActivation,
}

/// Layer activations retained by a cached forward pass.
pub struct ForwardCache {
    /// `acts[0]` is the network input; `acts[l + 1]` is layer `l`'s output.
    acts: Vec<Array2<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &Array2<f64> {
        self.acts.last().expect("cache always holds the input")
    }
}

/// Parameter-shaped gradient accumulator.
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl MlpGrads {
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            flat.extend(w.iter());
            flat.extend(b.iter());
        }
        flat
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    /// Scales every gradient by `factor` (used for norm clipping).
    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            w.mapv_inplace(|v| v * factor);
        }
        for b in &mut self.biases {
            b.mapv_inplace(|v| v * factor);
        }
    }

    pub fn global_norm(&self) -> f64 {
        let mut sq = 0.0;
        for w in &self.weights {
            sq += w.iter().map(|v| v * v).sum::<f64>();
        }
        for b in &self.biases {
            sq += b.iter().map(|v| v * v).sum::<f64>();
        }
        sq.sqrt()
    }
}

impl Mlp {
    /// Random initialization: uniform `+-1/sqrt(fan_in)` per layer, output
    /// layer in `+-3e-3`.
    pub fn new<R: Rng>(layer_sizes: &[usize], out_act: OutputActivation, rng: &mut R) -> Self {
        assert!(layer_sizes.len() >= 2, "need input and output sizes");
        let last = layer_sizes.len() - 2;
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (l, pair) in layer_sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = if l == last {
                FINAL_LAYER_BOUND
            } else {
                1.0 / (fan_in as f64).sqrt()
            };
            weights.push(Array2::from_shape_fn((fan_out, fan_in), |_| {
                rng.random_range(-bound..bound)
            }));
            biases.push(Array1::from_shape_fn(fan_out, |_| {
                rng.random_range(-bound..bound)
            }));
        }
        Mlp {
            weights,
            biases,
            out_act,
        }
    }

    /// All-zero network of the given shape (handy in tests).
    pub fn zeros(layer_sizes: &[usize], out_act: OutputActivation) -> Self {
        let weights = layer_sizes
            .windows(2)
            .map(|p| Array2::zeros((p[1], p[0])))
            .collect();
        let biases = layer_sizes.windows(2).map(|p| Array1::zeros(p[1])).collect();
        Mlp {
            weights,
            biases,
            out_act,
        }
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.weights[0].ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights[self.weights.len() - 1].nrows()
    }

    pub fn out_act(&self) -> OutputActivation {
        self.out_act
    }

    fn apply_layer(&self, l: usize, x: &Array2<f64>) -> Array2<f64> {
        let z = x.dot(&self.weights[l].t()) + &self.biases[l];
        if l + 1 == self.num_layers() {
            match self.out_act {
                OutputActivation::Tanh => z.mapv(f64::tanh),
                OutputActivation::Linear => z,
            }
        } else {
            z.mapv(|v| v.max(0.0))
        }
    }

    /// Batched forward pass; rows are samples.
    pub fn forward(&self, input: &Array2<f64>) -> Array2<f64> {
        let mut x = input.clone();
        for l in 0..self.num_layers() {
            x = self.apply_layer(l, &x);
        }
        x
    }

    /// Forward pass on a single sample.
    pub fn forward_one(&self, input: &[f64]) -> Vec<f64> {
        let x = Array2::from_shape_vec((1, input.len()), input.to_vec())
            .expect("shape matches by construction");
        self.forward(&x).row(0).to_vec()
    }

    /// Forward pass that keeps every layer's activation for `backward`.
    pub fn forward_cached(&self, input: &Array2<f64>) -> ForwardCache {
        let mut acts = Vec::with_capacity(self.num_layers() + 1);
        acts.push(input.clone());
        for l in 0..self.num_layers() {
            let next = self.apply_layer(l, &acts[l]);
            acts.push(next);
        }
        ForwardCache { acts }
    }

    /// Reverse-mode pass. `grad_output` is dLoss/dOutput for the batch in
    /// the cache; returns parameter gradients and dLoss/dInput.
    ///
    /// Activation derivatives come from the cached activations themselves:
    /// ReLU' is the positive-output indicator, tanh' is `1 - a^2`.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &Array2<f64>) -> (MlpGrads, Array2<f64>) {
        let layers = self.num_layers();
        let mut grads = MlpGrads {
            weights: self
                .weights
                .iter()
                .map(|w| Array2::zeros(w.raw_dim()))
                .collect(),
            biases: self.biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
        };
        let mut grad = grad_output.clone();
        for l in (0..layers).rev() {
            let act = &cache.acts[l + 1];
            // dLoss/dz for this layer
            let dz = if l + 1 == layers {
                match self.out_act {
                    OutputActivation::Tanh => {
                        let mut dz = grad;
                        dz.zip_mut_with(act, |g, &a| *g *= 1.0 - a * a);
                        dz
                    }
                    OutputActivation::Linear => grad,
                }
            } else {
                let mut dz = grad;
                dz.zip_mut_with(act, |g, &a| {
                    if a <= 0.0 {
                        *g = 0.0;
                    }
                });
                dz
            };
            grads.weights[l] = dz.t().dot(&cache.acts[l]);
            grads.biases[l] = dz.sum_axis(Axis(0));
            grad = dz.dot(&self.weights[l]);
        }
        (grads, grad)
    }

    pub fn num_params(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    /// Parameters flattened layer by layer, weights before biases.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.num_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            flat.extend(w.iter());
            flat.extend(b.iter());
        }
        flat
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params(), "parameter count mismatch");
        let mut offset = 0;
        for l in 0..self.weights.len() {
            for v in self.weights[l].iter_mut() {
                *v = flat[offset];
                offset += 1;
            }
            for v in self.biases[l].iter_mut() {
                *v = flat[offset];
                offset += 1;
            }
        }
    }

    /// FNV-1a over the parameter bit patterns; order-sensitive.
    pub fn param_hash(&self) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: f64| {
            for byte in v.to_bits().to_le_bytes() {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for (w, b) in self.weights.iter().zip(&self.biases) {
            w.iter().copied().for_each(&mut eat);
            b.iter().copied().for_each(&mut eat);
        }
        hash
    }

    /// Blends `src` into `self`: `self <- tau * src + (1 - tau) * self`.
    pub fn soft_update_from(&mut self, src: &Mlp, tau: f64) {
        for (dst, s) in self.weights.iter_mut().zip(&src.weights) {
            dst.zip_mut_with(s, |d, &v| *d = tau * v + (1.0 - tau) * *d);
        }
        for (dst, s) in self.biases.iter_mut().zip(&src.biases) {
            dst.zip_mut_with(s, |d, &v| *d = tau * v + (1.0 - tau) * *d);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_network_outputs_zero() {
        let actor = Mlp::zeros(&[9, 16, 16, 4], OutputActivation::Tanh);
        let out = actor.forward_one(&[0.3; 9]);
        assert_eq!(out, vec![0.0; 4]);
        let critic = Mlp::zeros(&[13, 16, 16, 1], OutputActivation::Linear);
        assert_eq!(critic.forward_one(&[0.5; 13]), vec![0.0]);
    }

    #[test]
    fn tanh_output_stays_in_unit_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let actor = Mlp::new(&[9, 32, 32, 4], OutputActivation::Tanh, &mut rng);
        for trial in 0..50 {
            let input: Vec<f64> = (0..9).map(|i| ((trial * 9 + i) as f64).sin() * 10.0).collect();
            for v in actor.forward_one(&input) {
                assert!((-1.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn forward_is_deterministic_for_fixed_seed() {
        let build = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            Mlp::new(&[9, 32, 32, 4], OutputActivation::Tanh, &mut rng)
        };
        let a = build().forward_one(&[0.1; 9]);
        let b = build().forward_one(&[0.1; 9]);
        assert_eq!(a, b);
    }

    #[test]
    fn flat_params_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Mlp::new(&[5, 8, 2], OutputActivation::Linear, &mut rng);
        let flat = net.flat_params();
        assert_eq!(flat.len(), net.num_params());
        let mut copy = Mlp::zeros(&[5, 8, 2], OutputActivation::Linear);
        copy.set_flat_params(&flat);
        assert_eq!(copy.flat_params(), flat);
        assert_eq!(copy.param_hash(), net.param_hash());
    }

    #[test]
    fn backward_matches_hand_derived_linear_case() {
        // Critic Q(x) = w . x + b, loss L = (y - Q)^2 on one sample:
        // dL/dw_i = -2 (y - Q) x_i, dL/db = -2 (y - Q).
        let mut net = Mlp::zeros(&[3, 1], OutputActivation::Linear);
        net.set_flat_params(&[0.5, -1.0, 2.0, 0.25]); // w = [0.5,-1,2], b = 0.25
        let x = Array2::from_shape_vec((1, 3), vec![1.0, 2.0, 3.0]).unwrap();
        let cache = net.forward_cached(&x);
        let q = cache.output()[(0, 0)];
        assert_relative_eq!(q, 0.5 - 2.0 + 6.0 + 0.25);
        let y = 1.0;
        let grad_out = Array2::from_elem((1, 1), -2.0 * (y - q));
        let (grads, _) = net.backward(&cache, &grad_out);
        let flat = grads.to_flat();
        let expect = [-2.0 * (y - q) * 1.0, -2.0 * (y - q) * 2.0, -2.0 * (y - q) * 3.0, -2.0 * (y - q)];
        for (g, e) in flat.iter().zip(expect) {
            assert_relative_eq!(g, &e, epsilon = 1e-12);
        }
    }

    #[test]
    fn backward_input_gradient_through_relu() {
        // One hidden ReLU unit: f(x) = relu(2x - 1); at x=1 f=1, df/dx=2;
        // at x=0 the unit is dead and df/dx=0.
        let mut net = Mlp::zeros(&[1, 1, 1], OutputActivation::Linear);
        net.set_flat_params(&[2.0, -1.0, 1.0, 0.0]); // w1=2 b1=-1 w2=1 b2=0
        let alive = Array2::from_elem((1, 1), 1.0);
        let cache = net.forward_cached(&alive);
        let (_, dx) = net.backward(&cache, &Array2::from_elem((1, 1), 1.0));
        assert_relative_eq!(dx[(0, 0)], 2.0);
        let dead = Array2::from_elem((1, 1), 0.0);
        let cache = net.forward_cached(&dead);
        let (_, dx) = net.backward(&cache, &Array2::from_elem((1, 1), 1.0));
        assert_eq!(dx[(0, 0)], 0.0);
    }

    #[test]
    fn soft_update_blends_parameters() {
        let mut dst = Mlp::zeros(&[2, 2], OutputActivation::Linear);
        let mut src = Mlp::zeros(&[2, 2], OutputActivation::Linear);
        src.set_flat_params(&[1.0; 6]);
        dst.soft_update_from(&src, 0.001);
        for v in dst.flat_params() {
            assert_relative_eq!(v, 0.001, epsilon = 1e-15);
        }
        // tau = 1 copies, tau = 0 is the identity
        let mut hard = Mlp::zeros(&[2, 2], OutputActivation::Linear);
        hard.soft_update_from(&src, 1.0);
        assert_eq!(hard.flat_params(), src.flat_params());
        let before = src.flat_params();
        src.soft_update_from(&hard, 0.0);
        assert_eq!(src.flat_params(), before);
    }
}
