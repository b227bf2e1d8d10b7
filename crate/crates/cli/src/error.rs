use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("expectation failed: {0}")]
    Expectation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Read { .. } | CliError::Write { .. } => 2,
            CliError::Numerical(_) | CliError::Expectation(_) => 3,
        }
    }
}

impl From<blowup::Error> for CliError {
    fn from(e: blowup::Error) -> Self {
        match e {
            blowup::Error::FitFailure { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}
