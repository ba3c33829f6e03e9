use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::env::{EnvDescriptor, QTable};
use crate::error::{Error, Result};

use super::aggregate::{aggregate, AggregateSeries};
use super::config::{ExperimentConfig, SuiteConfig};
use super::run::Experiment;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Identifies the code that produced a suite's outputs.
pub fn build_id() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, Serialize)]
pub struct CellStatus {
    pub seed_index: u64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub name: String,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latent_means: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_arm: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_hat: Option<QTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub cells: Vec<CellStatus>,
    #[serde(skip)]
    pub series: Option<AggregateSeries>,
}

impl ExperimentRecord {
    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| !c.ok).count()
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none() && self.failed_cells() == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub suite: String,
    pub build: String,
    pub variance: &'static str,
    pub config: String,
    pub experiments: Vec<ExperimentRecord>,
}

impl Manifest {
    pub fn all_ok(&self) -> bool {
        self.experiments.iter().all(ExperimentRecord::is_ok)
    }

    pub fn experiment(&self, name: &str) -> Option<&ExperimentRecord> {
        self.experiments.iter().find(|e| e.name == name)
    }

    /// Aggregate series of a successful experiment.
    pub fn series(&self, name: &str) -> Option<&AggregateSeries> {
        self.experiment(name).and_then(|e| e.series.as_ref())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    /// Worker threads; `None` uses every available core.
    pub jobs: Option<usize>,
}

/// Runs every (experiment, seed) cell of a validated suite and writes one
/// aggregate CSV per experiment plus `manifest.json` into `out_dir`.
///
/// Cells that fail are recorded in the manifest and the remaining cells
/// still run. Only an invalid config or an unwritable output directory
/// returns `Err`.
pub fn run_suite(suite: &SuiteConfig, out_dir: &Path, options: SuiteOptions) -> Result<Manifest> {
    suite.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = options.jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let mut q_cache: HashMap<String, QTable> = HashMap::new();
    let mut records = Vec::with_capacity(suite.experiments.len());
    for cfg in &suite.experiments {
        let record = pool.install(|| run_experiment(cfg, out_dir, &mut q_cache))?;
        records.push(record);
    }

    let manifest = Manifest {
        suite: suite.name.clone(),
        build: build_id(),
        variance: "population (divides by the number of seeds)",
        config: suite.to_toml(),
        experiments: records,
    };
    let path = out_dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

fn q_key(env: &EnvDescriptor, samples: u64) -> String {
    format!(
        "{}/{}/{:?}/{}/{}",
        env.family, env.n_arms, env.variance, env.seed, samples
    )
}

fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    q_cache: &mut HashMap<String, QTable>,
) -> Result<ExperimentRecord> {
    let mut record = ExperimentRecord {
        name: cfg.name.clone(),
        config: cfg.clone(),
        csv: None,
        latent_means: None,
        optimal_arm: None,
        q_hat: None,
        error: None,
        cells: Vec::new(),
        series: None,
    };
    let key = q_key(&cfg.env, cfg.q_samples);
    let prepared = match q_cache.get(&key) {
        Some(q) => Experiment::with_q(cfg.clone(), q.clone()),
        None => Experiment::prepare(cfg.clone()),
    };
    let exp = match prepared {
        Ok(exp) => exp,
        Err(e) => {
            record.error = Some(e.to_string());
            return Ok(record);
        }
    };
    q_cache.entry(key).or_insert_with(|| exp.q.clone());
    record.latent_means = Some(exp.env.latent_means().to_vec());
    record.optimal_arm = Some(exp.env.optimal_arm());
    record.q_hat = Some(exp.q.clone());

    let results: Vec<Result<_>> = (0..cfg.seeds.count).into_par_iter().map(|i| exp.run(i)).collect();
    let mut trajs = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(t) => {
                record.cells.push(CellStatus {
                    seed_index: i as u64,
                    ok: true,
                    error: None,
                });
                trajs.push(t);
            }
            Err(e) => record.cells.push(CellStatus {
                seed_index: i as u64,
                ok: false,
                error: Some(e.to_string()),
            }),
        }
    }
    if trajs.is_empty() {
        record.error = Some("every seed failed".into());
        return Ok(record);
    }
    let series = match aggregate(&trajs) {
        Ok(s) => s,
        Err(e) => {
            record.error = Some(e.to_string());
            return Ok(record);
        }
    };
    let file: PathBuf = format!("{}.csv", cfg.name).into();
    series.write_csv(&out_dir.join(&file))?;
    record.csv = Some(file.display().to_string());
    record.series = Some(series);
    Ok(record)
}
