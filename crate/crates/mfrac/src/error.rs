//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulation, estimation and data handling.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The circulant embedding could not be made nonnegative definite.
    #[error("simulation failure: {0}")]
    SimulationFailure(String),

    /// A quadrature or factorization did not reach its accuracy target.
    #[error("numerical failure: {msg} (achieved tolerance {achieved:.3e})")]
    NumericalFailure { msg: String, achieved: f64 },

    /// No grid point fell inside the estimation neighborhood.
    #[error("degenerate neighborhood at t0={t0}")]
    DegenerateNeighborhood { t0: f64 },

    /// A quadratic variation or oscillation was identically zero.
    #[error("degenerate statistic at t0={t0}: {msg}")]
    DegenerateStatistic { t0: f64, msg: String },

    /// Malformed input data, with the offending 1-based line when known.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
