use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] orbitlab::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config at `{pointer}`: {message}")]
    Config { pointer: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad input or configuration, 3 for resource caps, 4 for
    /// numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(orbitlab::Error::CapExceeded { .. }) => 3,
            CliError::Core(orbitlab::Error::NotConverged { .. }) => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
