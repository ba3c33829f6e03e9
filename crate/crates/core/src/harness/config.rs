//! Declarative experiment descriptions and their TOML form.
//!
//! A suite file is a list of `[[experiment]]` tables. Each table names a
//! rule and sets exactly the hyperparameters that rule uses; anything else
//! is rejected.
//!
//! ```toml
//! name = "demo"
//!
//! [[experiment]]
//! name = "spread-cl"
//! rule = "CL"
//! alpha = 0.001
//! runs = 100000
//! q_samples = 10000000
//!
//! [experiment.env]
//! family = "spread"
//! n_arms = 10
//! variance = 1.0
//! seed = 2
//!
//! [experiment.seeds]
//! count = 20
//! base = 0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::EnvDescriptor;
use crate::error::{Error, Result};
use crate::rule::{Rule, RuleClass};

/// Number of seeds and the key all of their streams derive from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    pub count: u64,
    pub base: u64,
}

/// How voter-rule revisions are scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Revision {
    /// Everyone revises at once against the old snapshot.
    #[default]
    Synchronous,
    /// `N` single-member revisions applied one after another.
    Sequential,
}

/// Initial state of a reference integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Start {
    /// Same seeded draw as the learners with the same seeds.
    #[default]
    Random,
    /// Equal share on every arm, as populations start.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub rule: Rule,
    pub env: EnvDescriptor,
    /// Learning rate (CL, MCL); Euler step for TRD/MRD, 1 when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Baseline weight (MCL).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pop_size: Option<usize>,
    /// Update steps per seed.
    pub runs: u64,
    pub seeds: SeedSpec,
    pub q_samples: u64,
    /// Record every this many steps; defaults to `ceil(runs / 1000)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revision: Option<Revision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Start>,
}

impl ExperimentConfig {
    /// Bare config for `rule`; callers fill in the rule's fields.
    pub fn new(name: impl Into<String>, rule: Rule, env: EnvDescriptor, runs: u64, seeds: SeedSpec) -> Self {
        ExperimentConfig {
            name: name.into(),
            rule,
            env,
            alpha: None,
            gamma: None,
            batch_size: None,
            pop_size: None,
            runs,
            seeds,
            q_samples: crate::env::DEFAULT_Q_SAMPLES,
            record_stride: None,
            revision: None,
            start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::Config(format!("experiment {:?}: {msg}", self.name)));
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        {
            return err("names may only use ASCII letters, digits, '-', '_' and '.'".into());
        }
        if self.env.n_arms < 2 {
            return err(format!("n_arms must be at least 2, got {}", self.env.n_arms));
        }
        if !(self.env.variance >= 0.0 && self.env.variance.is_finite()) {
            return err(format!("variance must be non-negative, got {}", self.env.variance));
        }
        if self.seeds.count == 0 {
            return err("seeds.count must be at least 1".into());
        }
        if self.q_samples == 0 {
            return err("q_samples must be at least 1".into());
        }
        if self.record_stride == Some(0) {
            return err("record_stride must be at least 1".into());
        }

        let (need, allow): (&[&str], &[&str]) = match self.rule {
            Rule::Cl => (&["alpha"], &[]),
            Rule::Mcl => (&["alpha", "gamma"], &[]),
            Rule::Bcl | Rule::Bmcl => (&["batch_size"], &[]),
            Rule::Vr => (&["pop_size"], &["revision"]),
            Rule::Wvr => (&["pop_size"], &[]),
            Rule::Trd | Rule::Mrd => (&[], &["alpha", "start"]),
        };
        for (field, set) in self.optional_fields() {
            if set && !need.contains(&field) && !allow.contains(&field) {
                return err(format!("field `{field}` does not apply to rule {}", self.rule));
            }
            if !set && need.contains(&field) {
                return err(format!("rule {} requires field `{field}`", self.rule));
            }
        }

        if let Some(alpha) = self.alpha {
            let ok = match self.rule.class() {
                RuleClass::Reference => alpha > 0.0 && alpha.is_finite(),
                _ => alpha > 0.0 && alpha <= 1.0,
            };
            if !ok {
                return err(format!("alpha {alpha} out of range"));
            }
        }
        if let Some(gamma) = self.gamma {
            if !(gamma > 0.0 && gamma <= 1.0) {
                return err(format!("gamma {gamma} outside (0, 1]"));
            }
        }
        if self.batch_size == Some(0) {
            return err("batch_size must be at least 1".into());
        }
        if let Some(n) = self.pop_size {
            if n < 2 || n < self.env.n_arms {
                return err(format!(
                    "pop_size {n} must be at least 2 and at least n_arms ({})",
                    self.env.n_arms
                ));
            }
        }
        Ok(())
    }

    fn optional_fields(&self) -> [(&'static str, bool); 6] {
        [
            ("alpha", self.alpha.is_some()),
            ("gamma", self.gamma.is_some()),
            ("batch_size", self.batch_size.is_some()),
            ("pop_size", self.pop_size.is_some()),
            ("revision", self.revision.is_some()),
            ("start", self.start.is_some()),
        ]
    }

    /// Time elapsed per update step: the learning rate for single-sample
    /// learners, the Euler step for references, 1 otherwise.
    pub fn time_scale(&self) -> f64 {
        match self.rule.class() {
            RuleClass::Learner => self.alpha.unwrap_or(1.0),
            RuleClass::Reference => self.alpha.unwrap_or(1.0),
            _ => 1.0,
        }
    }

    pub fn stride(&self) -> u64 {
        self.record_stride.unwrap_or_else(|| self.runs.div_ceil(1000).max(1))
    }

    /// Recorded step indices.
    pub fn record_grid(&self) -> Vec<u64> {
        let stride = self.stride();
        let mut grid: Vec<u64> = (0..=self.runs).step_by(stride as usize).collect();
        if grid.last() != Some(&self.runs) {
            grid.push(self.runs);
        }
        grid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: String,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<ExperimentConfig>,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.experiments.iter().enumerate() {
            e.validate()?;
            if self.experiments[..i].iter().any(|o| o.name == e.name) {
                return Err(Error::Config(format!("duplicate experiment name {:?}", e.name)));
            }
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let suite: SuiteConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        suite.validate()?;
        Ok(suite)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("suite configs always serialise")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Applies command-line overrides to every experiment.
    pub fn override_all(&mut self, o: &Overrides) {
        for e in &mut self.experiments {
            if let Some(base) = o.seed {
                e.seeds.base = base;
            }
            if let Some(count) = o.seeds {
                e.seeds.count = count;
            }
            if let Some(runs) = o.runs {
                e.runs = runs;
            }
            if let Some(q) = o.q_samples {
                e.q_samples = q;
            }
        }
    }
}

/// Suite-wide values given on the command line; they win over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub seeds: Option<u64>,
    pub runs: Option<u64>,
    pub q_samples: Option<u64>,
}
