use crate::env::{BanditEnv, QTable};
use crate::error::{Error, Result};
use crate::policy::{bcl_update, bmcl_update, cl_update, mcl_update, sample_action, Batch, RewardBaseline, Simplex};
use crate::population::init_population;
use crate::replicator::{integrate_strided, Dynamic, OdeConfig};
use crate::rng::{seed_stream, Lane};
use crate::rule::{Rule, RuleClass};
use crate::trajectory::{State, Trajectory};

use super::config::{ExperimentConfig, Revision, Start};

/// An experiment with its environment built and `q̂` estimated, ready to run
/// any of its seeds.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub env: BanditEnv,
    pub q: QTable,
}

/// Sums rewards between two recorded points.
#[derive(Default)]
struct Window {
    sum: f64,
    count: u64,
}

impl Window {
    fn add(&mut self, r: f64) {
        self.sum += r;
        self.count += 1;
    }

    fn take(&mut self) -> f64 {
        let mean = if self.count == 0 {
            f64::NAN
        } else {
            self.sum / self.count as f64
        };
        *self = Window::default();
        mean
    }
}

impl Experiment {
    pub fn prepare(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let env = config.env.build()?;
        let q = env.estimate_q(config.q_samples)?;
        Ok(Experiment { config, env, q })
    }

    /// Reuses an already estimated table for the same environment.
    pub fn with_q(config: ExperimentConfig, q: QTable) -> Result<Self> {
        config.validate()?;
        let env = config.env.build()?;
        if q.len() != env.n_arms() {
            return Err(Error::Contract(format!(
                "q table has {} arms, environment has {}",
                q.len(),
                env.n_arms()
            )));
        }
        Ok(Experiment { config, env, q })
    }

    /// Runs seed `index` of whatever rule the config names.
    pub fn run(&self, index: u64) -> Result<Trajectory> {
        match self.config.rule.class() {
            RuleClass::Learner | RuleClass::BatchedLearner => self.run_rl(index),
            RuleClass::Population => self.run_population(index, false),
            RuleClass::Reference => self.run_reference(index),
        }
    }

    fn initial_policy(&self, index: u64) -> Simplex {
        let mut rng = seed_stream(self.config.seeds.base, index, Lane::Init);
        Simplex::random(self.env.n_arms(), &mut rng)
    }

    fn wrong_rule(&self, expected: &str) -> Error {
        Error::Config(format!(
            "experiment {:?}: rule {} is not a {expected} rule",
            self.config.name, self.config.rule
        ))
    }

    /// Single-sample or batched learner from a seeded random policy.
    pub fn run_rl(&self, index: u64) -> Result<Trajectory> {
        let cfg = &self.config;
        if !matches!(cfg.rule.class(), RuleClass::Learner | RuleClass::BatchedLearner) {
            return Err(self.wrong_rule("learner"));
        }
        let mut rng = seed_stream(cfg.seeds.base, index, Lane::Dynamics);
        let mut pi = self.initial_policy(index);
        let stride = cfg.stride();
        let scale = cfg.time_scale();
        let mut traj = Trajectory::new(cfg.rule, self.env.optimal_arm());
        traj.record(0, 0.0, State::Probs(pi.clone()), &self.q, f64::NAN);

        let alpha = cfg.alpha.unwrap_or(1.0);
        let batch_size = cfg.batch_size.unwrap_or(1);
        let mut baseline = RewardBaseline::new(cfg.gamma.unwrap_or(1.0))?;
        let mut window = Window::default();

        for step in 1..=cfg.runs {
            pi = match cfg.rule {
                Rule::Cl | Rule::Mcl => {
                    let k = sample_action(&pi, &mut rng);
                    let r = self.env.draw(k, &mut rng);
                    window.add(r);
                    if cfg.rule == Rule::Cl {
                        cl_update(&pi, k, r, alpha)?
                    } else {
                        mcl_update(&pi, k, r, &mut baseline, alpha)?
                    }
                }
                Rule::Bcl => {
                    let batch = Batch::sample(&pi, &self.env, batch_size, &mut rng)?;
                    batch.samples().iter().for_each(|&(_, r)| window.add(r));
                    bcl_update(&pi, &batch)?
                }
                Rule::Bmcl => {
                    let batch = Batch::sample(&pi, &self.env, batch_size, &mut rng)?;
                    batch.samples().iter().for_each(|&(_, r)| window.add(r));
                    match bmcl_update(&pi, &batch) {
                        Ok(next) => next,
                        // No usable signal in this batch: keep the policy.
                        Err(Error::Degenerate(_)) => pi,
                        Err(e) => return Err(e),
                    }
                }
                _ => unreachable!(),
            };
            if step % stride == 0 || step == cfg.runs {
                traj.record(
                    step,
                    step as f64 * scale,
                    State::Probs(pi.clone()),
                    &self.q,
                    window.take(),
                );
            }
        }
        Ok(traj)
    }

    /// Voter or weighted-voter population from an even split over types.
    /// With `keep_members` the full member list is stored at every record.
    pub fn run_population(&self, index: u64, keep_members: bool) -> Result<Trajectory> {
        let cfg = &self.config;
        if cfg.rule.class() != RuleClass::Population {
            return Err(self.wrong_rule("population"));
        }
        let size = cfg
            .pop_size
            .ok_or_else(|| Error::Config("population rule without pop_size".into()))?;
        let mut rng = seed_stream(cfg.seeds.base, index, Lane::Dynamics);
        let mut pop = init_population(size, self.env.n_arms())?;
        let stride = cfg.stride();
        let mut traj = Trajectory::new(cfg.rule, self.env.optimal_arm());
        let mut members = keep_members.then(Vec::new);
        traj.record(0, 0.0, State::Counts(pop.counts()), &self.q, f64::NAN);
        if let Some(m) = members.as_mut() {
            m.push(pop.members().to_vec());
        }
        let mut window = Window::default();

        for step in 1..=cfg.runs {
            let (next, report) = match (cfg.rule, cfg.revision.unwrap_or_default()) {
                (Rule::Vr, Revision::Synchronous) => pop.vr_step_with_report(&self.env, &mut rng)?,
                (Rule::Vr, Revision::Sequential) => pop.vr_step_sequential(&self.env, &mut rng)?,
                (Rule::Wvr, _) => pop.wvr_step_with_report(&self.env, &mut rng)?,
                _ => unreachable!(),
            };
            pop = next;
            window.add(report.mean_payoff);
            if step % stride == 0 || step == cfg.runs {
                traj.record(step, step as f64, State::Counts(pop.counts()), &self.q, window.take());
                if let Some(m) = members.as_mut() {
                    m.push(pop.members().to_vec());
                }
            }
        }
        traj.members = members;
        Ok(traj)
    }

    /// Euler integration of TRD/MRD on `q̂`, over `runs` steps of size
    /// `alpha` (1 when unset), from the learners' initial draw for the same
    /// seed or from the uniform state.
    pub fn run_reference(&self, index: u64) -> Result<Trajectory> {
        let cfg = &self.config;
        let kind = match cfg.rule {
            Rule::Trd => Dynamic::Taylor,
            Rule::Mrd => Dynamic::MaynardSmith,
            _ => return Err(self.wrong_rule("reference")),
        };
        let pi0 = match cfg.start.unwrap_or_default() {
            Start::Random => self.initial_policy(index),
            Start::Uniform => Simplex::uniform(self.env.n_arms()),
        };
        let delta = cfg.time_scale();
        let optimal = self.env.optimal_arm();
        if cfg.runs == 0 {
            let mut traj = Trajectory::new(cfg.rule, optimal);
            let value = crate::policy::policy_value(&pi0, &self.q);
            traj.record(0, 0.0, State::Probs(pi0), &self.q, value);
            return Ok(traj);
        }
        let ode = OdeConfig::new(kind, delta, delta * cfg.runs as f64)?;
        let mut traj = integrate_strided(&ode, &pi0, &self.q, cfg.stride())?;
        if traj.optimal_arm != optimal {
            // q̂ noise can only reorder arms whose true means nearly tie; keep
            // metrics keyed on the environment's optimal arm.
            traj.optimal_arm = optimal;
            for p in &mut traj.points {
                p.mass_optimal = p.state.simplex().probs()[optimal];
                p.argmax_optimal = p.state.argmax_is(optimal);
            }
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{EnvDescriptor, EnvFamily};
    use crate::harness::config::SeedSpec;

    fn base(rule: Rule, runs: u64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(
            "t",
            rule,
            EnvDescriptor {
                family: EnvFamily::Spread,
                n_arms: 5,
                variance: 1.0,
                seed: 4,
            },
            runs,
            SeedSpec { count: 2, base: 9 },
        );
        cfg.q_samples = 10_000;
        cfg
    }

    #[test]
    fn zero_runs_keeps_initial_state() {
        for rule in Rule::ALL {
            let mut cfg = base(rule, 0);
            match rule {
                Rule::Cl => cfg.alpha = Some(0.1),
                Rule::Mcl => {
                    cfg.alpha = Some(0.1);
                    cfg.gamma = Some(0.01)
                }
                Rule::Bcl | Rule::Bmcl => cfg.batch_size = Some(4),
                Rule::Vr | Rule::Wvr => cfg.pop_size = Some(10),
                Rule::Trd | Rule::Mrd => {}
            }
            let exp = Experiment::prepare(cfg).unwrap();
            let t = exp.run(0).unwrap();
            assert_eq!(t.len(), 1, "{rule}");
            assert_eq!(t.points[0].step, 0);
        }
    }

    #[test]
    fn learner_and_reference_share_start() {
        let mut cl = base(Rule::Cl, 10);
        cl.alpha = Some(0.01);
        let mut trd = base(Rule::Trd, 10);
        trd.alpha = Some(0.01);
        let cl = Experiment::prepare(cl).unwrap();
        let trd = Experiment::prepare(trd).unwrap();
        for i in 0..3 {
            assert_eq!(cl.run(i).unwrap().points[0].state, trd.run(i).unwrap().points[0].state);
        }
        assert_ne!(cl.run(0).unwrap().points[0].state, cl.run(1).unwrap().points[0].state);
    }

    #[test]
    fn rule_mismatch_is_rejected() {
        let mut cl = base(Rule::Cl, 10);
        cl.alpha = Some(0.1);
        let exp = Experiment::prepare(cl).unwrap();
        assert!(exp.run_population(0, false).is_err());
        assert!(exp.run_reference(0).is_err());
    }

    #[test]
    fn absorbing_population_is_flat() {
        let mut cfg = base(Rule::Wvr, 20);
        cfg.pop_size = Some(10);
        let exp = Experiment::prepare(cfg).unwrap();
        let t = exp.run_population(0, true).unwrap();
        assert_eq!(t.len(), 21);
        assert_eq!(t.members.as_ref().unwrap().len(), 21);
        // Once pure, the counts never move again.
        let pure_from = t.points.iter().position(|p| match &p.state {
            State::Counts(c) => c.contains(&10),
            _ => false,
        });
        if let Some(i) = pure_from {
            assert!(t.points[i..].windows(2).all(|w| w[0].state == w[1].state));
        }
    }

    #[test]
    fn time_axis_uses_learning_rate() {
        let mut cfg = base(Rule::Mcl, 50);
        cfg.alpha = Some(0.1);
        cfg.gamma = Some(0.01);
        cfg.record_stride = Some(10);
        let t = Experiment::prepare(cfg).unwrap().run(0).unwrap();
        assert_eq!(t.steps().collect::<Vec<_>>(), vec![0, 10, 20, 30, 40, 50]);
        assert!((t.last().unwrap().time - 5.0).abs() < 1e-12);
        assert!(t.points[0].sampled_reward.is_nan());
        assert!(t.points[1].sampled_reward > 0.0);
    }
}
