use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("arm {arm} out of range for a {n_arms}-armed bandit")]
    ArmOutOfRange { arm: usize, n_arms: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate value: {0}")]
    Degenerate(String),

    #[error("step size too large: component {index} reached {value:e}")]
    StepSize { index: usize, value: f64 },

    #[error("integration aborted at step {step}: {source}")]
    Integration {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("aggregation: {0}")]
    Aggregation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
