//! Per-run records shared by learners, populations and reference integrators.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::env::QTable;
use crate::error::{Error, Result};
use crate::policy::{policy_value, Simplex};
use crate::rule::Rule;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum State {
    Probs(Simplex),
    /// Members per type.
    Counts(Vec<u64>),
}

impl State {
    pub fn len(&self) -> usize {
        match self {
            State::Probs(p) => p.len(),
            State::Counts(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn simplex(&self) -> Simplex {
        match self {
            State::Probs(p) => p.clone(),
            State::Counts(c) => {
                let n: u64 = c.iter().sum();
                Simplex::settled(c.iter().map(|&x| x as f64 / n as f64).collect())
            }
        }
    }

    /// Whether `arm` holds strictly more mass than every other arm.
    pub fn argmax_is(&self, arm: usize) -> bool {
        match self {
            State::Probs(p) => strict_max_at(p.probs(), arm),
            State::Counts(c) => strict_max_at(c, arm),
        }
    }
}

fn strict_max_at<T: PartialOrd>(xs: &[T], arm: usize) -> bool {
    xs.iter().enumerate().all(|(i, x)| i == arm || *x < xs[arm])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point {
    pub step: u64,
    pub time: f64,
    pub state: State,
    /// Privileged value `Σ π_a q̂_a`.
    pub value: f64,
    /// Mean of the rewards sampled since the previous record; NaN when
    /// nothing was sampled.
    pub sampled_reward: f64,
    /// Share of probability (or of members) on the optimal arm.
    pub mass_optimal: f64,
    pub argmax_optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub rule: Rule,
    pub optimal_arm: usize,
    pub points: Vec<Point>,
    /// Full member lists at each recorded step, kept only on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Vec<usize>>>,
}

impl Trajectory {
    pub fn new(rule: Rule, optimal_arm: usize) -> Self {
        Trajectory {
            rule,
            optimal_arm,
            points: Vec::new(),
            members: None,
        }
    }

    pub fn record(&mut self, step: u64, time: f64, state: State, q: &QTable, sampled_reward: f64) {
        debug_assert!(self.points.last().is_none_or(|p| p.step < step));
        let simplex = state.simplex();
        let value = policy_value(&simplex, q);
        let mass_optimal = simplex.probs()[self.optimal_arm];
        let argmax_optimal = state.argmax_is(self.optimal_arm);
        self.points.push(Point {
            step,
            time,
            state,
            value,
            sampled_reward,
            mass_optimal,
            argmax_optimal,
        });
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&Point> {
        self.points.last()
    }

    pub fn steps(&self) -> impl Iterator<Item = u64> + '_ {
        self.points.iter().map(|p| p.step)
    }

    /// Writes one row per recorded point. State columns are `p0..` for
    /// probability records and `c0..` for member counts.
    pub fn write_csv_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let width = self.points.first().map_or(0, |p| p.state.len());
        let prefix = match self.points.first().map(|p| &p.state) {
            Some(State::Counts(_)) => "c",
            _ => "p",
        };
        let mut header: Vec<String> = [
            "step",
            "time",
            "value",
            "sampled_reward",
            "mass_optimal",
            "argmax_optimal",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((0..width).map(|i| format!("{prefix}{i}")));
        w.write_record(&header).map_err(|e| Error::csv("<trajectory>", e))?;
        for p in &self.points {
            let mut row = vec![
                p.step.to_string(),
                fmt_f64(p.time),
                fmt_f64(p.value),
                fmt_f64(p.sampled_reward),
                fmt_f64(p.mass_optimal),
                u8::from(p.argmax_optimal).to_string(),
            ];
            match &p.state {
                State::Probs(s) => row.extend(s.probs().iter().map(|&x| fmt_f64(x))),
                State::Counts(c) => row.extend(c.iter().map(|x| x.to_string())),
            }
            w.write_record(&row).map_err(|e| Error::csv("<trajectory>", e))?;
        }
        w.flush().map_err(|e| Error::io("<trajectory>", e))?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(std::io::BufWriter::new(file)).map_err(|e| match e {
            Error::Csv { source, .. } => Error::csv(path, source),
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })
    }

    /// Member lists as `step,m0,m1,...`; empty unless members were kept.
    pub fn write_members_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
        if let Some(members) = &self.members {
            let width = members.first().map_or(0, Vec::len);
            let mut header = vec!["step".to_string()];
            header.extend((0..width).map(|i| format!("m{i}")));
            w.write_record(&header).map_err(|e| Error::csv(path, e))?;
            for (p, m) in self.points.iter().zip(members) {
                let mut row = vec![p.step.to_string()];
                row.extend(m.iter().map(|t| t.to_string()));
                w.write_record(&row).map_err(|e| Error::csv(path, e))?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Shortest representation that parses back to the same `f64`; independent
/// of locale.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
