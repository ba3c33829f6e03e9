//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a run or any suite cell fails, 2 for
//! usage and configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::env::{make_env, EnvDescriptor, EnvFamily, DEFAULT_Q_SAMPLES};
use crate::error::{Error, Result};
use crate::harness::presets::{self, PRESET_NAMES};
use crate::harness::{
    run_suite, Experiment, ExperimentConfig, Overrides, Revision, SeedSpec, Start, SuiteConfig, SuiteOptions,
};
use crate::rule::Rule;
use crate::trajectory::{fmt_f64, Trajectory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "swarmrl",
    version,
    about = "Bandit learners, voter populations and replicator dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every experiment of a suite file or preset.
    Suite(SuiteArgs),
    /// Run one seed of a CL, MCL, B-CL or B-MCL learner.
    Rl(RlArgs),
    /// Run one seed of a voter or weighted-voter population.
    Population(PopulationArgs),
    /// Integrate the Taylor or Maynard Smith replicator dynamic.
    Ode(OdeArgs),
    /// Estimate the expected reward of every arm.
    EstimateQ(EstimateQArgs),
    /// List built-in presets, or dump one as an editable suite file.
    Presets(PresetsArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    NearZero,
    Spread,
    NearOne,
}

impl From<Family> for EnvFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::NearZero => EnvFamily::NearZero,
            Family::Spread => EnvFamily::Spread,
            Family::NearOne => EnvFamily::NearOne,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LearnerRule {
    Cl,
    Mcl,
    Bcl,
    Bmcl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PopulationRule {
    Vr,
    Wvr,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReferenceRule {
    Trd,
    Mrd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RevisionArg {
    Synchronous,
    Sequential,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StartArg {
    Random,
    Uniform,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// Suite file, or the name of a built-in preset.
    #[arg(long)]
    config: String,
    /// Output directory for CSVs and the manifest.
    #[arg(long)]
    out: PathBuf,
    /// Base seed for every experiment.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of seeds for every experiment.
    #[arg(long)]
    seeds: Option<u64>,
    /// Update steps per seed for every experiment.
    #[arg(long)]
    runs: Option<u64>,
    /// Monte Carlo samples per arm for q estimation.
    #[arg(long)]
    q_samples: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct EnvArgs {
    #[arg(long, value_enum, default_value = "spread")]
    env: Family,
    #[arg(long, default_value_t = presets::N_ARMS)]
    arms: usize,
    #[arg(long, default_value_t = presets::VARIANCE)]
    variance: f64,
    /// Seed of the environment draw (default: --seed).
    #[arg(long)]
    env_seed: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Seed for every random stream of the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_Q_SAMPLES)]
    q_samples: u64,
    /// Record every this many steps (default: runs / 1000, at least 1).
    #[arg(long)]
    record_stride: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct RlArgs {
    #[arg(long, value_enum)]
    rule: LearnerRule,
    /// Learning rate (CL, MCL; default 0.001).
    #[arg(long)]
    alpha: Option<f64>,
    /// Reward baseline weight (MCL; default 0.01).
    #[arg(long)]
    gamma: Option<f64>,
    /// Samples per update (B-CL, B-MCL; default 1000).
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    runs: u64,
    #[command(flatten)]
    env: EnvArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct PopulationArgs {
    #[arg(long, value_enum)]
    rule: PopulationRule,
    #[arg(long, default_value_t = 1000)]
    pop_size: usize,
    #[arg(long, default_value_t = 100)]
    runs: u64,
    /// Voter-rule revision schedule.
    #[arg(long, value_enum)]
    revision: Option<RevisionArg>,
    /// Also write every recorded member list to this file.
    #[arg(long)]
    dump_members: Option<PathBuf>,
    #[command(flatten)]
    env: EnvArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct OdeArgs {
    #[arg(long, value_enum)]
    rule: ReferenceRule,
    /// Euler step (default 1).
    #[arg(long, alias = "delta")]
    alpha: Option<f64>,
    /// Number of Euler steps.
    #[arg(long, default_value_t = 100)]
    runs: u64,
    #[arg(long, value_enum)]
    start: Option<StartArg>,
    #[command(flatten)]
    env: EnvArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct EstimateQArgs {
    #[arg(long, value_enum, default_value = "spread")]
    env: Family,
    #[arg(long, default_value_t = presets::N_ARMS)]
    arms: usize,
    #[arg(long, default_value_t = presets::VARIANCE)]
    variance: f64,
    /// Environment seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_Q_SAMPLES)]
    samples: u64,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PresetsArgs {
    /// Preset to write out as a suite file.
    #[arg(long)]
    dump: Option<String>,
    /// Destination for --dump (default: stdout).
    #[arg(long, requires = "dump")]
    out: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => EXIT_CONFIG,
                _ => EXIT_FAILED,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Suite(a) => suite(a),
        Command::Rl(a) => rl(a),
        Command::Population(a) => population(a),
        Command::Ode(a) => ode(a),
        Command::EstimateQ(a) => estimate_q(a),
        Command::Presets(a) => list_presets(a),
    }
}

/// A path that exists wins over a preset of the same name.
fn load_suite(source: &str) -> Result<SuiteConfig> {
    let path = Path::new(source);
    if path.exists() {
        return SuiteConfig::load(path);
    }
    presets::preset(source).ok_or_else(|| {
        Error::Config(format!(
            "{source:?} is neither a file nor a preset ({})",
            PRESET_NAMES.join(", ")
        ))
    })
}

fn suite(a: SuiteArgs) -> Result<i32> {
    let Format::Csv = a.format;
    let mut suite = load_suite(&a.config)?;
    suite.override_all(&Overrides {
        seed: a.seed,
        seeds: a.seeds,
        runs: a.runs,
        q_samples: a.q_samples,
    });
    let manifest = run_suite(&suite, &a.out, SuiteOptions { jobs: a.jobs })?;
    for e in &manifest.experiments {
        let status = if e.is_ok() { "ok" } else { "FAILED" };
        eprintln!("{:<24} {status} ({} failed cells)", e.name, e.failed_cells());
        if let Some(err) = &e.error {
            eprintln!("  {err}");
        }
    }
    Ok(if manifest.all_ok() { EXIT_OK } else { EXIT_FAILED })
}

fn descriptor(env: &EnvArgs, seed: u64) -> EnvDescriptor {
    EnvDescriptor {
        family: env.env.into(),
        n_arms: env.arms,
        variance: env.variance,
        seed: env.env_seed.unwrap_or(seed),
    }
}

fn single_config(name: &str, rule: Rule, runs: u64, env: &EnvArgs, run: &RunArgs) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        name,
        rule,
        descriptor(env, run.seed),
        runs,
        SeedSpec {
            count: 1,
            base: run.seed,
        },
    );
    cfg.q_samples = run.q_samples;
    cfg.record_stride = run.record_stride;
    cfg
}

fn emit(traj: &Trajectory, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => traj.write_csv(path),
        None => traj.write_csv_to(std::io::stdout().lock()),
    }
}

fn rl(a: RlArgs) -> Result<i32> {
    let Format::Csv = a.run.format;
    let rule = match a.rule {
        LearnerRule::Cl => Rule::Cl,
        LearnerRule::Mcl => Rule::Mcl,
        LearnerRule::Bcl => Rule::Bcl,
        LearnerRule::Bmcl => Rule::Bmcl,
    };
    let mut cfg = single_config("rl", rule, a.runs, &a.env, &a.run);
    cfg.alpha = a.alpha;
    cfg.gamma = a.gamma;
    cfg.batch_size = a.batch_size;
    match rule {
        Rule::Cl => {
            cfg.alpha.get_or_insert(0.001);
        }
        Rule::Mcl => {
            cfg.alpha.get_or_insert(0.001);
            cfg.gamma.get_or_insert(presets::GAMMA);
        }
        _ => {
            cfg.batch_size.get_or_insert(1000);
        }
    }
    let exp = Experiment::prepare(cfg)?;
    emit(&exp.run_rl(0)?, a.run.out.as_deref())?;
    Ok(EXIT_OK)
}

fn population(a: PopulationArgs) -> Result<i32> {
    let Format::Csv = a.run.format;
    let rule = match a.rule {
        PopulationRule::Vr => Rule::Vr,
        PopulationRule::Wvr => Rule::Wvr,
    };
    let mut cfg = single_config("population", rule, a.runs, &a.env, &a.run);
    cfg.pop_size = Some(a.pop_size);
    cfg.revision = a.revision.map(|r| match r {
        RevisionArg::Synchronous => Revision::Synchronous,
        RevisionArg::Sequential => Revision::Sequential,
    });
    let exp = Experiment::prepare(cfg)?;
    let traj = exp.run_population(0, a.dump_members.is_some())?;
    emit(&traj, a.run.out.as_deref())?;
    if let Some(path) = &a.dump_members {
        traj.write_members_csv(path)?;
    }
    Ok(EXIT_OK)
}

fn ode(a: OdeArgs) -> Result<i32> {
    let Format::Csv = a.run.format;
    let rule = match a.rule {
        ReferenceRule::Trd => Rule::Trd,
        ReferenceRule::Mrd => Rule::Mrd,
    };
    let mut cfg = single_config("ode", rule, a.runs, &a.env, &a.run);
    cfg.alpha = a.alpha;
    cfg.start = a.start.map(|s| match s {
        StartArg::Random => Start::Random,
        StartArg::Uniform => Start::Uniform,
    });
    let exp = Experiment::prepare(cfg)?;
    emit(&exp.run_reference(0)?, a.run.out.as_deref())?;
    Ok(EXIT_OK)
}

fn estimate_q(a: EstimateQArgs) -> Result<i32> {
    let env = make_env(a.env.into(), a.arms, a.variance, a.seed)?;
    let q = env.estimate_q(a.samples)?;
    let mut text = String::from("arm,latent_mean,q\n");
    for (arm, (mean, q)) in env.latent_means().iter().zip(q.values()).enumerate() {
        text.push_str(&format!("{arm},{},{}\n", fmt_f64(*mean), fmt_f64(*q)));
    }
    write_text(&text, a.out.as_deref())?;
    Ok(EXIT_OK)
}

fn list_presets(a: PresetsArgs) -> Result<i32> {
    match a.dump {
        Some(name) => {
            let suite = presets::preset(&name).ok_or_else(|| Error::Config(format!("unknown preset {name:?}")))?;
            write_text(&suite.to_toml(), a.out.as_deref())?;
        }
        None => write_text(&(PRESET_NAMES.join("\n") + "\n"), None)?,
    }
    Ok(EXIT_OK)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}
