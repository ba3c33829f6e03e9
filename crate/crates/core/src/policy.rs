//! Probability vectors over arms and the Cross Learning family of updates.
//!
//! A [`Simplex`] is read either as a stateless policy (probability of pulling
//! each arm) or as a population vector (share of individuals holding each
//! type). The updates here act on it from the policy side:
//!
//! | rule  | samples per update | reward scaling |
//! |-------|--------------------|----------------|
//! | CL    | 1                  | `α · r`        |
//! | MCL   | 1                  | `α · r / r̄`    |
//! | B-CL  | B (averaged)       | `r`            |
//! | B-MCL | B (averaged)       | `r / mean(r)`  |
//!
//! All four move mass along the same direction `e_k − π` for a sampled arm
//! `k`. The expected directions ([`expected_cl_direction`],
//! [`expected_mcl_direction`]) are the right-hand sides of the Taylor and
//! Maynard Smith replicator dynamics.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::env::{BanditEnv, QTable};
use crate::error::{Error, Result};

/// Allowed deviation of a simplex from unit mass.
pub const SUM_TOLERANCE: f64 = 1e-9;
/// Drift beyond this before renormalisation means an update is broken.
const MAX_DRIFT: f64 = 1e-6;
/// Floor for reward baselines and batch means.
pub const REWARD_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Simplex(Vec<f64>);

impl Simplex {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Contract("simplex needs at least one entry".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Contract(format!("simplex entry {p} outside [0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::Contract(format!("simplex sums to {sum}")));
        }
        Ok(Simplex(probs))
    }

    pub fn uniform(n: usize) -> Self {
        Simplex(vec![1.0 / n as f64; n])
    }

    pub fn pure(n: usize, arm: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[arm] = 1.0;
        Simplex(probs)
    }

    /// Uniform draw from the simplex (flat Dirichlet), via normalised
    /// exponential variates.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        settle(draws.into_iter().map(|x| x / total).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Builds a simplex from a vector that is already within drift of unit
    /// mass and inside `[0, 1]`.
    pub(crate) fn settled(probs: Vec<f64>) -> Self {
        settle(probs)
    }
}

impl TryFrom<Vec<f64>> for Simplex {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Simplex::new(probs)
    }
}

impl From<Simplex> for Vec<f64> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

fn settle(mut probs: Vec<f64>) -> Simplex {
    let sum: f64 = probs.iter().sum();
    assert!((sum - 1.0).abs() <= MAX_DRIFT, "simplex drifted to total mass {sum}");
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        probs.iter_mut().for_each(|p| *p /= sum);
    }
    Simplex(probs)
}

fn clamp_and_renormalize(mut probs: Vec<f64>) -> Simplex {
    probs.iter_mut().for_each(|p| *p = p.clamp(0.0, 1.0));
    let sum: f64 = probs.iter().sum();
    // The raw update has unit mass, so at least one entry stays positive.
    debug_assert!(sum > 0.0);
    probs.iter_mut().for_each(|p| *p /= sum);
    Simplex(probs)
}

fn check_arm(pi: &Simplex, arm: usize) -> Result<()> {
    if arm >= pi.len() {
        return Err(Error::ArmOutOfRange { arm, n_arms: pi.len() });
    }
    Ok(())
}

fn check_reward(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Contract(format!("reward {r} outside [0, 1]")));
    }
    Ok(())
}

/// Draws an arm with probability `pi[arm]`.
pub fn sample_action<R: Rng + ?Sized>(pi: &Simplex, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (a, &p) in pi.probs().iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = a;
            if u < acc {
                return a;
            }
        }
    }
    last_positive
}

/// Unit-reward Cross Learning direction `e_k − π`.
pub fn cross_direction(pi: &Simplex, k: usize) -> Vec<f64> {
    pi.probs()
        .iter()
        .enumerate()
        .map(|(a, &p)| if a == k { 1.0 - p } else { -p })
        .collect()
}

/// Cross Learning step scaled by a learning rate; `alpha = 1` is the
/// original rule. Stays on the simplex without clamping.
pub fn cl_update(pi: &Simplex, k: usize, r_k: f64, alpha: f64) -> Result<Simplex> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Contract(format!("learning rate {alpha} outside (0, 1]")));
    }
    check_reward(r_k)?;
    check_arm(pi, k)?;
    let step = alpha * r_k;
    let keep = 1.0 - step;
    let probs = pi
        .probs()
        .iter()
        .enumerate()
        .map(|(a, &p)| if a == k { (p * keep + step).min(1.0) } else { p * keep })
        .collect();
    Ok(settle(probs))
}

/// Moving-average estimate of the policy value used by MCL.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardBaseline {
    r_bar: Option<f64>,
    gamma: f64,
}

impl RewardBaseline {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Contract(format!("baseline weight {gamma} outside (0, 1]")));
        }
        Ok(RewardBaseline { r_bar: None, gamma })
    }

    /// Baseline already holding `r_bar`.
    pub fn with_value(r_bar: f64, gamma: f64) -> Result<Self> {
        let mut b = Self::new(gamma)?;
        if !(r_bar > 0.0 && r_bar <= 1.0) {
            return Err(Error::Contract(format!("baseline {r_bar} outside (0, 1]")));
        }
        b.r_bar = Some(r_bar);
        Ok(b)
    }

    pub fn value(&self) -> Option<f64> {
        self.r_bar
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// First observation initialises the average.
    fn prime(&mut self, r: f64) {
        if self.r_bar.is_none() {
            self.r_bar = Some(r.max(REWARD_FLOOR));
        }
    }

    pub fn observe(&mut self, r: f64) {
        let next = match self.r_bar {
            Some(prev) => self.gamma * r + (1.0 - self.gamma) * prev,
            None => r,
        };
        self.r_bar = Some(next.max(REWARD_FLOOR));
    }
}

/// Maynard-Cross Learning step: the CL step with the reward divided by the
/// running baseline, clamped to `[0, 1]` and renormalised. The baseline
/// absorbs `r_k` afterwards.
pub fn mcl_update(pi: &Simplex, k: usize, r_k: f64, baseline: &mut RewardBaseline, alpha: f64) -> Result<Simplex> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Contract(format!("learning rate {alpha} outside (0, 1]")));
    }
    check_reward(r_k)?;
    check_arm(pi, k)?;
    baseline.prime(r_k);
    let r_bar = baseline.r_bar.unwrap_or(0.0);
    if r_bar <= 0.0 {
        return Err(Error::Degenerate(format!("reward baseline {r_bar}")));
    }
    let step = alpha * r_k / r_bar;
    let raw = pi
        .probs()
        .iter()
        .enumerate()
        .map(|(a, &p)| if a == k { p + step * (1.0 - p) } else { p - step * p })
        .collect();
    let next = clamp_and_renormalize(raw);
    baseline.observe(r_k);
    Ok(next)
}

/// `B` action/reward pairs drawn from one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch(Vec<(usize, f64)>);

impl Batch {
    pub fn new(samples: Vec<(usize, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Contract("empty batch".into()));
        }
        for &(_, r) in &samples {
            check_reward(r)?;
        }
        Ok(Batch(samples))
    }

    /// Pulls `size` arms from `pi` and records their rewards.
    pub fn sample<R: Rng + ?Sized>(pi: &Simplex, env: &BanditEnv, size: usize, rng: &mut R) -> Result<Self> {
        let samples = (0..size)
            .map(|_| {
                let k = sample_action(pi, rng);
                (k, env.draw(k, rng))
            })
            .collect();
        Batch::new(samples)
    }

    pub fn samples(&self) -> &[(usize, f64)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean_reward(&self) -> f64 {
        self.0.iter().map(|&(_, r)| r).sum::<f64>() / self.0.len() as f64
    }

    /// Per-arm reward totals divided by the batch size.
    fn reward_shares(&self, n: usize) -> Result<Vec<f64>> {
        let mut shares = vec![0.0; n];
        for &(k, r) in &self.0 {
            if k >= n {
                return Err(Error::ArmOutOfRange { arm: k, n_arms: n });
            }
            shares[k] += r;
        }
        let b = self.0.len() as f64;
        shares.iter_mut().for_each(|s| *s /= b);
        Ok(shares)
    }
}

/// Batched Cross Learning: the average of the unit-rate CL steps of every
/// sample, all taken from the same `pi`.
pub fn bcl_update(pi: &Simplex, batch: &Batch) -> Result<Simplex> {
    let shares = batch.reward_shares(pi.len())?;
    let mean: f64 = shares.iter().sum();
    let probs = pi
        .probs()
        .iter()
        .zip(&shares)
        .map(|(&p, &s)| (p * (1.0 - mean) + s).clamp(0.0, 1.0))
        .collect();
    Ok(settle(probs))
}

/// Batched Maynard-Cross Learning: rewards are divided by the batch mean.
///
/// Returns [`Error::Degenerate`] when the batch mean is below
/// [`REWARD_FLOOR`]; callers skip such batches.
pub fn bmcl_update(pi: &Simplex, batch: &Batch) -> Result<Simplex> {
    let shares = batch.reward_shares(pi.len())?;
    let mean: f64 = shares.iter().sum();
    if mean < REWARD_FLOOR {
        return Err(Error::Degenerate(format!("batch mean reward {mean:e}")));
    }
    let raw = pi
        .probs()
        .iter()
        .zip(&shares)
        .map(|(&p, &s)| p + (s - p * mean) / mean)
        .collect();
    Ok(clamp_and_renormalize(raw))
}

/// `Σ_a π_a q_a`.
///
/// # Panics
/// If `pi` and `q` have different lengths.
pub fn policy_value(pi: &Simplex, q: &QTable) -> f64 {
    assert_eq!(pi.len(), q.len(), "policy and q table disagree on arm count");
    pi.probs().iter().zip(q.values()).map(|(p, q)| p * q).sum()
}

/// Expected CL step `π_a (q_a − v^π)`, the Taylor replicator field.
pub fn expected_cl_direction(pi: &Simplex, q: &QTable) -> Vec<f64> {
    let v = policy_value(pi, q);
    pi.probs().iter().zip(q.values()).map(|(p, qa)| p * (qa - v)).collect()
}

/// Expected MCL step `(π_a / v^π)(q_a − v^π)`, the Maynard Smith replicator
/// field.
pub fn expected_mcl_direction(pi: &Simplex, q: &QTable) -> Result<Vec<f64>> {
    let v = policy_value(pi, q);
    if v <= 0.0 {
        return Err(Error::Degenerate(format!("policy value {v}")));
    }
    Ok(expected_cl_direction(pi, q).into_iter().map(|d| d / v).collect())
}
