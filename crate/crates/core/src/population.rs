//! Finite populations revising their type by the voter rule or the weighted
//! voter rule.
//!
//! Both steps are synchronous: every member samples a payoff for its current
//! type, then every member decides its next type by looking only at the
//! pre-step snapshot. The decision logic lives in [`resolve_voter`] and
//! [`resolve_weighted`], which take every random quantity as an argument so
//! that outcomes can be enumerated exhaustively.

use rand::Rng;

use crate::env::BanditEnv;
use crate::error::{Error, Result};
use crate::policy::Simplex;

/// Total vote mass below which a weighted-voter step is skipped.
pub const VOTE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    members: Vec<usize>,
    n_types: usize,
}

/// Population of `size` members spread as evenly as possible over `n_types`
/// types; the remainder goes to the lowest type indices.
pub fn init_population(size: usize, n_types: usize) -> Result<Population> {
    if n_types == 0 || size < n_types {
        return Err(Error::Config(format!(
            "population of {size} cannot cover {n_types} types"
        )));
    }
    if size < 2 {
        return Err(Error::Config(format!("population size must be at least 2, got {size}")));
    }
    let base = size / n_types;
    let extra = size % n_types;
    let members = (0..n_types)
        .flat_map(|t| std::iter::repeat_n(t, base + usize::from(t < extra)))
        .collect();
    Ok(Population { members, n_types })
}

/// What a step observed besides the new population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// Mean payoff sampled by the members during the step.
    pub mean_payoff: f64,
    /// Weighted voter step skipped because no votes were cast.
    pub degenerate: bool,
}

impl Population {
    pub fn from_members(members: Vec<usize>, n_types: usize) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::Config(format!(
                "population size must be at least 2, got {}",
                members.len()
            )));
        }
        if let Some(&t) = members.iter().find(|&&t| t >= n_types) {
            return Err(Error::Contract(format!("member type {t} outside 0..{n_types}")));
        }
        Ok(Population { members, n_types })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn n_types(&self) -> usize {
        self.n_types
    }

    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_types];
        for &t in &self.members {
            counts[t] += 1;
        }
        counts
    }

    pub fn vector(&self) -> Simplex {
        let n = self.size() as f64;
        Simplex::settled(self.counts().into_iter().map(|c| c as f64 / n).collect())
    }

    pub fn is_pure(&self) -> bool {
        self.members.iter().all(|&t| t == self.members[0])
    }

    fn check_env(&self, env: &BanditEnv) -> Result<()> {
        if env.n_arms() != self.n_types {
            return Err(Error::Contract(format!(
                "population has {} types but the environment has {} arms",
                self.n_types,
                env.n_arms()
            )));
        }
        Ok(())
    }

    fn sample_payoffs<R: Rng + ?Sized>(&self, env: &BanditEnv, rng: &mut R) -> Vec<f64> {
        self.members.iter().map(|&t| env.draw(t, rng)).collect()
    }

    pub fn vr_step<R: Rng + ?Sized>(&self, env: &BanditEnv, rng: &mut R) -> Result<Population> {
        self.vr_step_with_report(env, rng).map(|(p, _)| p)
    }

    /// Voter rule: each member picks a partner uniformly (itself included)
    /// and copies the partner's old type with probability equal to the
    /// partner's sampled payoff.
    pub fn vr_step_with_report<R: Rng + ?Sized>(
        &self,
        env: &BanditEnv,
        rng: &mut R,
    ) -> Result<(Population, StepReport)> {
        self.check_env(env)?;
        let n = self.size();
        let payoffs = self.sample_payoffs(env, rng);
        let partners: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let coins: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let members = resolve_voter(&self.members, &payoffs, &partners, &coins);
        let report = StepReport {
            mean_payoff: mean(&payoffs),
            degenerate: false,
        };
        Ok((
            Population {
                members,
                n_types: self.n_types,
            },
            report,
        ))
    }

    /// Voter rule applied one random member at a time, `N` revisions per
    /// call, each seeing the revisions made before it. Exploratory; not
    /// covered by the mean-field equivalence.
    pub fn vr_step_sequential<R: Rng + ?Sized>(
        &self,
        env: &BanditEnv,
        rng: &mut R,
    ) -> Result<(Population, StepReport)> {
        self.check_env(env)?;
        let n = self.size();
        let mut members = self.members.clone();
        let mut payoff_sum = 0.0;
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            let payoff = env.draw(members[j], rng);
            payoff_sum += payoff;
            if rng.random::<f64>() < payoff {
                members[i] = members[j];
            }
        }
        let report = StepReport {
            mean_payoff: payoff_sum / n as f64,
            degenerate: false,
        };
        Ok((
            Population {
                members,
                n_types: self.n_types,
            },
            report,
        ))
    }

    pub fn wvr_step<R: Rng + ?Sized>(&self, env: &BanditEnv, rng: &mut R) -> Result<Population> {
        self.wvr_step_with_report(env, rng).map(|(p, _)| p)
    }

    /// Weighted voter rule: each member votes for its opinion with weight
    /// equal to its sampled payoff, then every member independently adopts
    /// an opinion drawn from the normalised vote distribution. With no votes
    /// cast the population is returned unchanged.
    pub fn wvr_step_with_report<R: Rng + ?Sized>(
        &self,
        env: &BanditEnv,
        rng: &mut R,
    ) -> Result<(Population, StepReport)> {
        self.check_env(env)?;
        let payoffs = self.sample_payoffs(env, rng);
        let coins: Vec<f64> = (0..self.size()).map(|_| rng.random()).collect();
        let mean_payoff = mean(&payoffs);
        let (members, degenerate) = match resolve_weighted(&self.members, self.n_types, &payoffs, &coins) {
            Some(members) => (members, false),
            None => (self.members.clone(), true),
        };
        Ok((
            Population {
                members,
                n_types: self.n_types,
            },
            StepReport {
                mean_payoff,
                degenerate,
            },
        ))
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Voter-rule decision for every member: member `i` takes
/// `members[partners[i]]` iff `coins[i] < payoffs[partners[i]]`.
pub fn resolve_voter(members: &[usize], payoffs: &[f64], partners: &[usize], coins: &[f64]) -> Vec<usize> {
    members
        .iter()
        .zip(partners.iter().zip(coins))
        .map(|(&own, (&j, &u))| if u < payoffs[j] { members[j] } else { own })
        .collect()
}

/// Vote share of every opinion, or `None` when the total vote mass is below
/// [`VOTE_FLOOR`].
pub fn vote_distribution(members: &[usize], n_types: usize, payoffs: &[f64]) -> Option<Vec<f64>> {
    let mut votes = vec![0.0; n_types];
    for (&t, &r) in members.iter().zip(payoffs) {
        votes[t] += r;
    }
    let total: f64 = votes.iter().sum();
    if total <= VOTE_FLOOR {
        return None;
    }
    votes.iter_mut().for_each(|v| *v /= total);
    Some(votes)
}

/// Weighted-voter decision for every member: opinion drawn by inverting the
/// cumulative vote distribution at `coins[i] ∈ [0, 1)`.
pub fn resolve_weighted(members: &[usize], n_types: usize, payoffs: &[f64], coins: &[f64]) -> Option<Vec<usize>> {
    let shares = vote_distribution(members, n_types, payoffs)?;
    let mut cumulative = Vec::with_capacity(n_types);
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (t, &s) in shares.iter().enumerate() {
        acc += s;
        cumulative.push(acc);
        if s > 0.0 {
            last_positive = t;
        }
    }
    Some(
        coins
            .iter()
            .map(|&u| {
                shares
                    .iter()
                    .zip(&cumulative)
                    .position(|(&s, &c)| s > 0.0 && u < c)
                    .unwrap_or(last_positive)
            })
            .collect(),
    )
}
