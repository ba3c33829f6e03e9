use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{fmt_f64, Trajectory};

/// Column order of aggregate CSV files.
pub const COLUMNS: [&str; 8] = [
    "step",
    "time",
    "mean_value",
    "var_value",
    "mean_sampled_reward",
    "frac_seeds_optimal",
    "mean_mass_optimal",
    "var_mass_optimal",
];

/// One row per recorded step. Variances divide by the number of seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub step: u64,
    pub time: f64,
    pub mean_value: f64,
    pub var_value: f64,
    pub mean_sampled_reward: f64,
    pub frac_seeds_optimal: f64,
    pub mean_mass_optimal: f64,
    pub var_mass_optimal: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AggregateSeries {
    pub rows: Vec<AggregateRow>,
}

fn mean_var(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Pointwise mean and variance across seeds. All trajectories must share
/// the same step grid.
pub fn aggregate(trajs: &[Trajectory]) -> Result<AggregateSeries> {
    let Some(first) = trajs.first() else {
        return Ok(AggregateSeries::default());
    };
    for (i, t) in trajs.iter().enumerate().skip(1) {
        if t.len() != first.len() || t.steps().ne(first.steps()) {
            return Err(Error::Aggregation(format!(
                "trajectory {i} records {} steps on a different grid than trajectory 0 ({} steps)",
                t.len(),
                first.len()
            )));
        }
    }
    let n = trajs.len() as f64;
    let rows = (0..first.len())
        .map(|i| {
            let pts: Vec<_> = trajs.iter().map(|t| &t.points[i]).collect();
            let (mean_value, var_value) = mean_var(pts.iter().map(|p| p.value));
            let (mean_mass_optimal, var_mass_optimal) = mean_var(pts.iter().map(|p| p.mass_optimal));
            let mean_sampled_reward = pts.iter().map(|p| p.sampled_reward).sum::<f64>() / n;
            let frac_seeds_optimal = pts.iter().filter(|p| p.argmax_optimal).count() as f64 / n;
            AggregateRow {
                step: first.points[i].step,
                time: first.points[i].time,
                mean_value,
                var_value,
                mean_sampled_reward,
                frac_seeds_optimal,
                mean_mass_optimal,
                var_mass_optimal,
            }
        })
        .collect();
    Ok(AggregateSeries { rows })
}

impl AggregateSeries {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&AggregateRow> {
        self.rows.last()
    }

    /// Largest `|mean_value − other.mean_value|` over rows with equal steps.
    pub fn max_value_gap(&self, other: &AggregateSeries) -> Result<f64> {
        if self.len() != other.len() || self.rows.iter().zip(&other.rows).any(|(a, b)| a.step != b.step) {
            return Err(Error::Aggregation("series are recorded on different grids".into()));
        }
        Ok(self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| (a.mean_value - b.mean_value).abs())
            .fold(0.0, f64::max))
    }

    pub fn write_csv_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(COLUMNS).map_err(|e| Error::csv("<series>", e))?;
        for r in &self.rows {
            w.write_record([
                r.step.to_string(),
                fmt_f64(r.time),
                fmt_f64(r.mean_value),
                fmt_f64(r.var_value),
                fmt_f64(r.mean_sampled_reward),
                fmt_f64(r.frac_seeds_optimal),
                fmt_f64(r.mean_mass_optimal),
                fmt_f64(r.var_mass_optimal),
            ])
            .map_err(|e| Error::csv("<series>", e))?;
        }
        w.flush().map_err(|e| Error::io("<series>", e))?;
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

    pub fn read_csv_from<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers().map_err(|e| Error::csv("<series>", e))?;
        if header.iter().ne(COLUMNS) {
            return Err(Error::Aggregation(format!(
                "unexpected columns {:?}",
                header.iter().collect::<Vec<_>>()
            )));
        }
        let rows = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<AggregateRow>, _>>()
            .map_err(|e| Error::csv("<series>", e))?;
        Ok(AggregateSeries { rows })
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv_from(std::io::BufReader::new(file))
    }
}
