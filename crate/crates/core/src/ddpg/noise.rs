//! Ornstein-Uhlenbeck exploration noise: temporally correlated, zero-mean,
//! one channel per action dimension.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::env::ACTION_DIM;

/// Discrete-time OU process with unit time step:
/// `x <- x - nu * x + sigma * g`, `g ~ N(0, 1)` per channel.
#[derive(Debug, Clone)]
pub struct OuNoise {
    state: [f64; ACTION_DIM],
    /// Mean-reversion rate.
    pub nu: f64,
    /// Noise scale.
    pub sigma: f64,
}

impl OuNoise {
    pub fn new(nu: f64, sigma: f64) -> Self {
        OuNoise {
            state: [0.0; ACTION_DIM],
            nu,
            sigma,
        }
    }

    /// Zeroes the state; called at every episode start.
    pub fn reset(&mut self) {
        self.state = [0.0; ACTION_DIM];
    }

    pub fn state(&self) -> [f64; ACTION_DIM] {
        self.state
    }

    /// Advances the process one step and returns the new state.
    pub fn step<R: Rng>(&mut self, rng: &mut R) -> [f64; ACTION_DIM] {
        for x in &mut self.state {
            let g: f64 = StandardNormal.sample(rng);
            *x = *x - self.nu * *x + self.sigma * g;
        }
        self.state
    }
}
