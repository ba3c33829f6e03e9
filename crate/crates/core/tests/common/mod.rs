//! Oracles shared by the integration tests.
#![allow(dead_code)]

use swarmrl::env::{sigmoid, BanditEnv, QTable};

/// `E[s(m + σZ)]` by trapezoidal quadrature over `z ∈ [-12, 12]`. The
/// integrand is smooth and decays like the normal density, so the rule is
/// accurate to far below Monte Carlo noise.
pub fn squashed_mean(latent: f64, variance: f64) -> f64 {
    let sd = variance.sqrt();
    if sd == 0.0 {
        return sigmoid(latent);
    }
    let h = 1e-3;
    let steps = 24_000;
    let norm = (2.0 * std::f64::consts::PI).sqrt();
    let mut sum = 0.0;
    for i in 0..=steps {
        let z = -12.0 + i as f64 * h;
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        sum += w * sigmoid(latent + sd * z) * (-0.5 * z * z).exp() / norm;
    }
    sum * h
}

pub fn exact_q(env: &BanditEnv) -> QTable {
    QTable::from_values(
        env.latent_means()
            .iter()
            .map(|&m| squashed_mean(m, env.variance()))
            .collect(),
    )
    .unwrap()
}

/// Running mean and variance per component.
#[derive(Clone)]
pub struct Moments {
    n: u64,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Moments {
            n: 0,
            sum: vec![0.0; dim],
            sum_sq: vec![0.0; dim],
        }
    }

    pub fn add(&mut self, x: &[f64]) {
        self.n += 1;
        for (i, &v) in x.iter().enumerate() {
            self.sum[i] += v;
            self.sum_sq[i] += v * v;
        }
    }

    pub fn merge(mut self, other: Moments) -> Moments {
        self.n += other.n;
        for i in 0..self.sum.len() {
            self.sum[i] += other.sum[i];
            self.sum_sq[i] += other.sum_sq[i];
        }
        self
    }

    pub fn mean(&self) -> Vec<f64> {
        self.sum.iter().map(|s| s / self.n as f64).collect()
    }

    /// Standard error of each component mean.
    pub fn std_err(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.sum
            .iter()
            .zip(&self.sum_sq)
            .map(|(s, sq)| {
                let m = s / n;
                let var = (sq / n - m * m).max(0.0) * n / (n - 1.0);
                (var / n).sqrt()
            })
            .collect()
    }
}
