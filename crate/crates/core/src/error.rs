//! Error type shared across the crate.
//!
//! Two failure classes matter to callers: a request outside the domain a
//! routine is defined on, and a numerical breakdown inside an otherwise
//! valid computation. The CLI maps them to distinct exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a precondition or leaves the admissible region.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical procedure failed (NaN, non-convergence).
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
