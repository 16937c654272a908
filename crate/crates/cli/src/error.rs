//! CLI error type and exit-code mapping: 2 for domain/usage problems,
//! 3 for numeric failures.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ivri_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(ivri_core::Error::Domain(_)) => 2,
            CliError::Core(ivri_core::Error::Numeric(_)) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
