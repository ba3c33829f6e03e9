//! Forward-Euler integration of the Taylor and Maynard Smith replicator
//! dynamics.
//!
//! ```text
//! TRD:  π̇_a = π_a (q_a − v^π)
//! MRD:  π̇_a = (π_a / v^π)(q_a − v^π)
//! ```
//!
//! Both fields share their direction; the Maynard Smith field is the Taylor
//! field divided by `v^π ∈ (0, 1]`, so it is never slower. With `δ = 1` the
//! Maynard Smith step is exactly the discrete replicator map
//! `π_a ← π_a q_a / v^π`.

use serde::{Deserialize, Serialize};

use crate::env::QTable;
use crate::error::{Error, Result};
use crate::policy::{expected_cl_direction, policy_value, Simplex};
use crate::rule::Rule;
use crate::trajectory::{State, Trajectory};

/// Smallest policy value the Maynard Smith field accepts.
pub const VALUE_FLOOR: f64 = 1e-12;
const NEGATIVE_SLACK: f64 = 1e-9;
const RENORM_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dynamic {
    #[serde(rename = "TRD")]
    Taylor,
    #[serde(rename = "MRD")]
    MaynardSmith,
}

impl Dynamic {
    pub fn rule(self) -> Rule {
        match self {
            Dynamic::Taylor => Rule::Trd,
            Dynamic::MaynardSmith => Rule::Mrd,
        }
    }

    /// Right-hand side of the dynamic at `pi`.
    pub fn field(self, pi: &Simplex, q: &QTable) -> Result<Vec<f64>> {
        let taylor = expected_cl_direction(pi, q);
        match self {
            Dynamic::Taylor => Ok(taylor),
            Dynamic::MaynardSmith => {
                let v = policy_value(pi, q);
                if v <= VALUE_FLOOR {
                    return Err(Error::Degenerate(format!("policy value {v:e}")));
                }
                Ok(taylor.into_iter().map(|d| d / v).collect())
            }
        }
    }

    pub fn step(self, pi: &Simplex, q: &QTable, delta: f64) -> Result<Simplex> {
        let field = self.field(pi, q)?;
        euler(pi, &field, delta)
    }
}

fn euler(pi: &Simplex, field: &[f64], delta: f64) -> Result<Simplex> {
    let mut next: Vec<f64> = pi.probs().iter().zip(field).map(|(p, d)| p + delta * d).collect();
    for (index, p) in next.iter_mut().enumerate() {
        if *p < -NEGATIVE_SLACK {
            return Err(Error::StepSize { index, value: *p });
        }
        *p = p.clamp(0.0, 1.0);
    }
    let sum: f64 = next.iter().sum();
    if (sum - 1.0).abs() > RENORM_THRESHOLD {
        next.iter_mut().for_each(|p| *p /= sum);
    }
    Ok(Simplex::settled(next))
}

/// One Euler step of the Taylor replicator dynamic.
pub fn trd_step(pi: &Simplex, q: &QTable, delta: f64) -> Result<Simplex> {
    Dynamic::Taylor.step(pi, q, delta)
}

/// One Euler step of the Maynard Smith replicator dynamic.
pub fn mrd_step(pi: &Simplex, q: &QTable, delta: f64) -> Result<Simplex> {
    Dynamic::MaynardSmith.step(pi, q, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub kind: Dynamic,
    pub delta: f64,
    pub t_final: f64,
}

impl OdeConfig {
    pub fn new(kind: Dynamic, delta: f64, t_final: f64) -> Result<Self> {
        let cfg = OdeConfig { kind, delta, t_final };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.t_final >= self.delta && self.t_final.is_finite()) {
            return Err(Error::Config(format!(
                "t_final {} must be at least delta {}",
                self.t_final, self.delta
            )));
        }
        Ok(())
    }

    /// `ceil(t_final / delta)`, ignoring rounding noise in the quotient.
    pub fn steps(&self) -> u64 {
        let ratio = self.t_final / self.delta;
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest as u64
        } else {
            ratio.ceil() as u64
        }
    }
}

/// Integrates from `pi0`, recording every state.
pub fn integrate(cfg: &OdeConfig, pi0: &Simplex, q: &QTable) -> Result<Trajectory> {
    integrate_strided(cfg, pi0, q, 1)
}

/// Integrates from `pi0`, recording step 0, every `stride`-th step and the
/// final step.
pub fn integrate_strided(cfg: &OdeConfig, pi0: &Simplex, q: &QTable, stride: u64) -> Result<Trajectory> {
    cfg.validate()?;
    if stride == 0 {
        return Err(Error::Config("record stride must be positive".into()));
    }
    if pi0.len() != q.len() {
        return Err(Error::Contract(format!(
            "initial state has {} arms, q table has {}",
            pi0.len(),
            q.len()
        )));
    }
    let steps = cfg.steps();
    let mut traj = Trajectory::new(cfg.kind.rule(), q.best_arm());
    let mut pi = pi0.clone();
    traj.record(0, 0.0, State::Probs(pi.clone()), q, policy_value(&pi, q));
    for step in 1..=steps {
        pi = cfg.kind.step(&pi, q, cfg.delta).map_err(|e| Error::Integration {
            step: step as usize,
            source: Box::new(e),
        })?;
        if step % stride == 0 || step == steps {
            let value = policy_value(&pi, q);
            traj.record(step, step as f64 * cfg.delta, State::Probs(pi.clone()), q, value);
        }
    }
    Ok(traj)
}

/// First step at which the mass on `arm` reaches `target`, or `None` within
/// `max_steps`.
pub fn steps_to_mass(
    kind: Dynamic,
    pi0: &Simplex,
    q: &QTable,
    delta: f64,
    arm: usize,
    target: f64,
    max_steps: u64,
) -> Result<Option<u64>> {
    let mut pi = pi0.clone();
    for step in 0..=max_steps {
        if pi.probs()[arm] >= target {
            return Ok(Some(step));
        }
        pi = kind.step(&pi, q, delta)?;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: &[f64]) -> Simplex {
        Simplex::new(p.to_vec()).unwrap()
    }

    fn q(v: &[f64]) -> QTable {
        QTable::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn trd_hand_step() {
        let next = trd_step(&s(&[0.5, 0.5]), &q(&[0.8, 0.4]), 0.1).unwrap();
        assert!((next.probs()[0] - 0.51).abs() < 1e-15);
        assert!((next.probs()[1] - 0.49).abs() < 1e-15);
    }

    #[test]
    fn mrd_hand_step() {
        let next = mrd_step(&s(&[0.5, 0.5]), &q(&[0.8, 0.4]), 0.1).unwrap();
        assert!((next.probs()[0] - 0.516_67).abs() < 1e-5);
        assert!((next.probs()[1] - 0.483_33).abs() < 1e-5);
    }

    #[test]
    fn fixed_points() {
        let flat = q(&[0.4, 0.4, 0.4]);
        let pi = s(&[0.2, 0.3, 0.5]);
        assert_eq!(trd_step(&pi, &flat, 0.1).unwrap(), pi);
        assert_eq!(mrd_step(&pi, &flat, 0.1).unwrap(), pi);
        let pure = Simplex::pure(3, 1);
        let qt = q(&[0.9, 0.2, 0.5]);
        assert_eq!(trd_step(&pure, &qt, 1.0).unwrap(), pure);
        assert_eq!(mrd_step(&pure, &qt, 1.0).unwrap(), pure);
    }

    #[test]
    fn mrd_rejects_zero_value() {
        let pi = Simplex::pure(2, 0);
        assert!(matches!(mrd_step(&pi, &q(&[0.0, 1.0]), 0.1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn oversized_step_is_reported() {
        let err = trd_step(&s(&[0.5, 0.5]), &q(&[1.0, 0.0]), 10.0).unwrap_err();
        assert!(matches!(err, Error::StepSize { index: 1, .. }));
    }

    #[test]
    fn integrate_lengths() {
        let qt = q(&[0.8, 0.4]);
        let pi = Simplex::uniform(2);
        let cfg = OdeConfig::new(Dynamic::Taylor, 0.1, 0.1).unwrap();
        assert_eq!(integrate(&cfg, &pi, &qt).unwrap().len(), 2);
        let cfg = OdeConfig::new(Dynamic::Taylor, 0.001, 100.0).unwrap();
        assert_eq!(cfg.steps(), 100_000);
        let cfg = OdeConfig::new(Dynamic::Taylor, 0.3, 1.0).unwrap();
        assert_eq!(cfg.steps(), 4);
        assert!(OdeConfig::new(Dynamic::Taylor, 0.0, 1.0).is_err());
        assert!(OdeConfig::new(Dynamic::Taylor, 1.0, 0.5).is_err());
    }

    #[test]
    fn integrate_strided_keeps_last_step() {
        let qt = q(&[0.8, 0.4, 0.1]);
        let cfg = OdeConfig::new(Dynamic::MaynardSmith, 1.0, 10.0).unwrap();
        let t = integrate_strided(&cfg, &Simplex::uniform(3), &qt, 3).unwrap();
        assert_eq!(t.steps().collect::<Vec<_>>(), vec![0, 3, 6, 9, 10]);
        assert_eq!(t.points[4].time, 10.0);
    }

    #[test]
    fn integration_errors_carry_step() {
        let qt = q(&[1.0, 0.0]);
        let cfg = OdeConfig::new(Dynamic::Taylor, 3.0, 9.0).unwrap();
        let err = integrate(&cfg, &Simplex::uniform(2), &qt).unwrap_err();
        assert!(matches!(err, Error::Integration { step: 1, .. }));
    }
}
