use std::path::PathBuf;

use thiserror::Error;

/// Failures of a command, split by the exit status they map to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation or configuration (exit 2).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("invalid configuration {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },

    /// A check or threshold failed (exit 1).
    #[error("{0}")]
    Scientific(String),

    #[error(transparent)]
    Core(#[from] fraccal::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use fraccal::Error as E;
        match self {
            CliError::Scientific(_) => 1,
            CliError::Core(
                E::Assumption { .. }
                | E::DirichletEigenvalue { .. }
                | E::NotPositiveDefinite(_)
                | E::InsufficientData(_),
            ) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
