//! Stateless multi-armed bandits with sigmoid-squashed Gaussian rewards.
//!
//! Pulling arm `a` draws `x ~ N(Q_a, σ²)` and returns `sigmoid(x)`, which lies
//! in `(0, 1)`. The squashing moves the expected reward away from
//! `sigmoid(Q_a)`; the actual means `q_a` are recovered by Monte Carlo with
//! [`BanditEnv::estimate_q`] and are only ever handed to reference
//! integrators and metrics, never to learners.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{env_draw_stream, env_estimate_stream};

/// Default Monte Carlo sample count per arm for [`BanditEnv::estimate_q`].
pub const DEFAULT_Q_SAMPLES: u64 = 10_000_000;

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Where the latent means of an environment are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvFamily {
    /// Expected rewards close to 0.
    NearZero,
    /// Expected rewards spread over most of (0, 1).
    Spread,
    /// Expected rewards close to 1.
    NearOne,
}

impl EnvFamily {
    pub const ALL: [EnvFamily; 3] = [EnvFamily::NearZero, EnvFamily::Spread, EnvFamily::NearOne];

    /// Half-open range `[lo, hi)` of the uniform latent-mean draw.
    ///
    /// With σ² = 1 these keep the squashed means inside roughly
    /// (0.004, 0.105), (0.07, 0.93) and (0.895, 0.996).
    pub fn latent_range(self) -> (f64, f64) {
        match self {
            EnvFamily::NearZero => (-6.0, -2.5),
            EnvFamily::Spread => (-3.0, 3.0),
            EnvFamily::NearOne => (2.5, 6.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnvFamily::NearZero => "near-zero",
            EnvFamily::Spread => "spread",
            EnvFamily::NearOne => "near-one",
        }
    }
}

impl fmt::Display for EnvFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to rebuild an environment bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvDescriptor {
    pub family: EnvFamily,
    pub n_arms: usize,
    pub variance: f64,
    pub seed: u64,
}

impl EnvDescriptor {
    pub fn build(&self) -> Result<BanditEnv> {
        make_env(self.family, self.n_arms, self.variance, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditEnv {
    latent_means: Vec<f64>,
    variance: f64,
    std_dev: f64,
    family: Option<EnvFamily>,
    seed: u64,
}

/// Draws a bandit of the given family. The latent means are a pure function
/// of `seed`, and the largest one is always unique.
pub fn make_env(family: EnvFamily, n_arms: usize, variance: f64, seed: u64) -> Result<BanditEnv> {
    if n_arms < 2 {
        return Err(Error::Config(format!("n_arms must be at least 2, got {n_arms}")));
    }
    check_variance(variance)?;
    let (lo, hi) = family.latent_range();
    let mut rng = env_draw_stream(seed);
    let mut means: Vec<f64> = (0..n_arms).map(|_| rng.random_range(lo..hi)).collect();
    // Redraw any arm that exactly collides with an earlier one.
    loop {
        let clash = (1..n_arms).find(|&i| means[..i].contains(&means[i]));
        match clash {
            Some(i) => means[i] = rng.random_range(lo..hi),
            None => break,
        }
    }
    Ok(BanditEnv {
        latent_means: means,
        variance,
        std_dev: variance.sqrt(),
        family: Some(family),
        seed,
    })
}

fn check_variance(variance: f64) -> Result<()> {
    if !(variance.is_finite() && variance >= 0.0) {
        return Err(Error::Config(format!(
            "variance must be finite and non-negative, got {variance}"
        )));
    }
    Ok(())
}

impl BanditEnv {
    /// Environment with explicit latent means. `seed` only feeds
    /// [`estimate_q`](Self::estimate_q).
    pub fn from_latent_means(latent_means: Vec<f64>, variance: f64, seed: u64) -> Result<Self> {
        if latent_means.len() < 2 {
            return Err(Error::Config(format!(
                "n_arms must be at least 2, got {}",
                latent_means.len()
            )));
        }
        if latent_means.iter().any(|q| !q.is_finite()) {
            return Err(Error::Config("latent means must be finite".into()));
        }
        check_variance(variance)?;
        Ok(BanditEnv {
            latent_means,
            variance,
            std_dev: variance.sqrt(),
            family: None,
            seed,
        })
    }

    pub fn n_arms(&self) -> usize {
        self.latent_means.len()
    }

    pub fn latent_means(&self) -> &[f64] {
        &self.latent_means
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn family(&self) -> Option<EnvFamily> {
        self.family
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Arm with the largest latent mean (first one on ties). Since the
    /// squashed mean is increasing in the latent mean at fixed variance, this
    /// is also the arm with the largest expected reward.
    pub fn optimal_arm(&self) -> usize {
        argmax(&self.latent_means)
    }

    pub fn sample_reward<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<f64> {
        if arm >= self.n_arms() {
            return Err(Error::ArmOutOfRange {
                arm,
                n_arms: self.n_arms(),
            });
        }
        Ok(self.draw(arm, rng))
    }

    /// Unchecked hot-path variant of [`sample_reward`](Self::sample_reward).
    #[inline]
    pub(crate) fn draw<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        sigmoid(self.latent_means[arm] + self.std_dev * z)
    }

    /// Monte Carlo estimate of the expected reward of every arm.
    ///
    /// Each arm uses its own stream keyed on the environment seed, so the
    /// table is deterministic and arms are estimated in parallel.
    pub fn estimate_q(&self, samples: u64) -> Result<QTable> {
        if samples == 0 {
            return Err(Error::Contract("estimate_q needs at least one sample".into()));
        }
        let q = (0..self.n_arms())
            .into_par_iter()
            .map(|arm| {
                let mut rng = env_estimate_stream(self.seed, arm);
                let mut sum = 0.0;
                for _ in 0..samples {
                    sum += self.draw(arm, &mut rng);
                }
                sum / samples as f64
            })
            .collect();
        Ok(QTable {
            q,
            sample_count: samples,
        })
    }
}

/// Expected reward per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    pub q: Vec<f64>,
    /// Samples per arm behind each entry; 0 when the table was given directly.
    pub sample_count: u64,
}

impl QTable {
    pub fn from_values(q: Vec<f64>) -> Result<Self> {
        if q.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Contract("q entries must lie in [0, 1]".into()));
        }
        Ok(QTable { q, sample_count: 0 })
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn best_arm(&self) -> usize {
        argmax(&self.q)
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}
