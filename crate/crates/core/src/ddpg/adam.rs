//! Adaptive-moment optimizer over a flat parameter vector: exponential
//! first/second moment estimates with bias correction.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(lr: f64, num_params: usize) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.step
    }

    /// One descent step in place: `p -= lr * m_hat / (sqrt(v_hat) + eps)`.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_step_matches_formula() {
        // After one step: m_hat = g, v_hat = g^2, so the update is
        // -lr * g / (|g| + eps).
        let mut opt = Adam::new(0.01, 2);
        let mut p = [1.0, -2.0];
        let g = [0.5, -4.0];
        opt.step(&mut p, &g);
        for i in 0..2 {
            let expect = [1.0, -2.0][i] - 0.01 * g[i] / (g[i].abs() + 1e-8);
            assert_relative_eq!(p[i], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_gradient_leaves_params_untouched() {
        let mut opt = Adam::new(0.1, 3);
        let mut p = [0.3, 0.6, -0.9];
        let before = p;
        opt.step(&mut p, &[0.0; 3]);
        assert_eq!(p, before);
    }

    #[test]
    fn converges_on_a_quadratic() {
        // minimize (p - 3)^2
        let mut opt = Adam::new(0.05, 1);
        let mut p = [0.0];
        for _ in 0..2000 {
            let g = [2.0 * (p[0] - 3.0)];
            opt.step(&mut p, &g);
        }
        assert_relative_eq!(p[0], 3.0, epsilon = 1e-3);
    }
}
