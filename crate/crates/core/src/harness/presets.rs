//! Built-in suites mirroring the published experiment layout.
//!
//! | preset        | contents                                              |
//! |---------------|-------------------------------------------------------|
//! | `figure-1`    | CL, MCL vs TRD, MRD; α = 0.001, R = 10⁶; all envs     |
//! | `figure-2`    | same with α = 0.1, R = 10³                             |
//! | `figure-3`    | VR, WVR with N ∈ {10, 1000} vs TRD, MRD; spread env   |
//! | `figure-4`    | B-CL, B-MCL with B ∈ {10, 1000} vs TRD, MRD; spread   |
//! | `appendix-A1` | B-CL, B-MCL with B = 1000; near-zero and near-one     |
//! | `appendix-A2` | VR, WVR with N = 1000; near-zero and near-one         |
//!
//! All use 10 arms, σ² = 1, 100 seeds and `q̂` from 10⁷ samples per arm.

use crate::env::{EnvDescriptor, EnvFamily, DEFAULT_Q_SAMPLES};
use crate::rule::Rule;

use super::config::{ExperimentConfig, SeedSpec, Start, SuiteConfig};

pub const PRESET_NAMES: [&str; 6] = [
    "figure-1",
    "figure-2",
    "figure-3",
    "figure-4",
    "appendix-A1",
    "appendix-A2",
];

pub const N_ARMS: usize = 10;
pub const VARIANCE: f64 = 1.0;
pub const SEEDS: u64 = 100;
pub const GAMMA: f64 = 0.01;
const BATCHED_RUNS: u64 = 100;

/// Fixed environment seed per family.
pub fn env_seed(family: EnvFamily) -> u64 {
    match family {
        EnvFamily::NearZero => 1,
        EnvFamily::Spread => 2,
        EnvFamily::NearOne => 3,
    }
}

pub fn env(family: EnvFamily) -> EnvDescriptor {
    EnvDescriptor {
        family,
        n_arms: N_ARMS,
        variance: VARIANCE,
        seed: env_seed(family),
    }
}

fn exp(name: String, rule: Rule, family: EnvFamily, runs: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(name, rule, env(family), runs, SeedSpec { count: SEEDS, base: 0 });
    cfg.q_samples = DEFAULT_Q_SAMPLES;
    cfg
}

/// CL, MCL and their references at one learning rate.
pub fn non_batched(family: EnvFamily, alpha: f64, runs: u64) -> Vec<ExperimentConfig> {
    let f = family.name();
    let mut cl = exp(format!("{f}-cl"), Rule::Cl, family, runs);
    cl.alpha = Some(alpha);
    let mut mcl = exp(format!("{f}-mcl"), Rule::Mcl, family, runs);
    mcl.alpha = Some(alpha);
    mcl.gamma = Some(GAMMA);
    let mut trd = exp(format!("{f}-trd"), Rule::Trd, family, runs);
    trd.alpha = Some(alpha);
    let mut mrd = exp(format!("{f}-mrd"), Rule::Mrd, family, runs);
    mrd.alpha = Some(alpha);
    vec![cl, mcl, trd, mrd]
}

/// B-CL and B-MCL at the given batch sizes, plus unit-step references.
pub fn batched(family: EnvFamily, batch_sizes: &[usize]) -> Vec<ExperimentConfig> {
    let f = family.name();
    let mut out = Vec::new();
    for &b in batch_sizes {
        for (rule, tag) in [(Rule::Bcl, "bcl"), (Rule::Bmcl, "bmcl")] {
            let mut cfg = exp(format!("{f}-{tag}-{b}"), rule, family, BATCHED_RUNS);
            cfg.batch_size = Some(b);
            out.push(cfg);
        }
    }
    out.push(exp(format!("{f}-trd"), Rule::Trd, family, BATCHED_RUNS));
    out.push(exp(format!("{f}-mrd"), Rule::Mrd, family, BATCHED_RUNS));
    out
}

/// VR and WVR at the given sizes, plus references from the even split.
pub fn populations(family: EnvFamily, sizes: &[usize]) -> Vec<ExperimentConfig> {
    let f = family.name();
    let mut out = Vec::new();
    for &n in sizes {
        for (rule, tag) in [(Rule::Vr, "vr"), (Rule::Wvr, "wvr")] {
            let mut cfg = exp(format!("{f}-{tag}-{n}"), rule, family, BATCHED_RUNS);
            cfg.pop_size = Some(n);
            out.push(cfg);
        }
    }
    for (rule, tag) in [(Rule::Trd, "trd"), (Rule::Mrd, "mrd")] {
        let mut cfg = exp(format!("{f}-{tag}"), rule, family, BATCHED_RUNS);
        cfg.start = Some(Start::Uniform);
        out.push(cfg);
    }
    out
}

/// Looks a preset up by name; a leading `paper-` is accepted.
pub fn preset(name: &str) -> Option<SuiteConfig> {
    let key = name.strip_prefix("paper-").unwrap_or(name);
    let tails = [EnvFamily::NearZero, EnvFamily::NearOne];
    let experiments: Vec<ExperimentConfig> = match key {
        "figure-1" => EnvFamily::ALL
            .iter()
            .flat_map(|&f| non_batched(f, 0.001, 1_000_000))
            .collect(),
        "figure-2" => EnvFamily::ALL
            .iter()
            .flat_map(|&f| non_batched(f, 0.1, 1_000))
            .collect(),
        "figure-3" => populations(EnvFamily::Spread, &[10, 1000]),
        "figure-4" => batched(EnvFamily::Spread, &[10, 1000]),
        "appendix-A1" => tails.iter().flat_map(|&f| batched(f, &[1000])).collect(),
        "appendix-A2" => tails.iter().flat_map(|&f| populations(f, &[1000])).collect(),
        _ => return None,
    };
    Some(SuiteConfig {
        name: key.to_string(),
        experiments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for name in PRESET_NAMES {
            let suite = preset(name).unwrap();
            suite.validate().unwrap();
            let back = SuiteConfig::from_toml(&suite.to_toml()).unwrap();
            assert_eq!(back, suite, "{name}");
        }
        assert_eq!(preset("paper-figure-3"), preset("figure-3"));
        assert!(preset("figure-9").is_none());
    }

    #[test]
    fn figure_one_layout() {
        let suite = preset("figure-1").unwrap();
        assert_eq!(suite.experiments.len(), 12);
        let cl = &suite.experiments[0];
        assert_eq!(cl.alpha, Some(0.001));
        assert_eq!(cl.runs, 1_000_000);
        assert_eq!(cl.stride(), 1000);
        assert_eq!(cl.seeds.count, 100);
    }
}
