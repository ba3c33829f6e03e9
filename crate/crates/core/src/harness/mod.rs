//! Experiment orchestration: configs, seeded runs, aggregation across seeds,
//! CSV output and built-in presets.
//!
//! The unit of work is one `(experiment, seed)` cell. A cell owns its
//! policy or population, its baseline and its random streams; cells run in
//! parallel and are reduced in seed order, so output does not depend on
//! scheduling.

mod aggregate;
mod config;
pub mod presets;
mod run;
mod suite;

pub use aggregate::{aggregate, AggregateRow, AggregateSeries, COLUMNS};
pub use config::{ExperimentConfig, Overrides, Revision, SeedSpec, Start, SuiteConfig};
pub use run::Experiment;
pub use suite::{build_id, run_suite, CellStatus, ExperimentRecord, Manifest, SuiteOptions, MANIFEST_FILE};
