use thiserror::Error;

use crate::pipeline::ValidationReport;

/// Crate-wide error type.
///
/// The variants map onto the CLI exit codes: `Validation` exits with 2,
/// `Numerical` with 3, everything else with 1.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Structural validation of input files failed; the report lists
    /// every violation with file and row context.
    #[error("validation failed with {} issue(s)", .0.issues.len())]
    Validation(ValidationReport),

    /// A numerical routine could not produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
