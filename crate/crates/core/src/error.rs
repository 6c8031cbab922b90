//! Error type shared across the crate.

/// Errors produced by builders, sketches and solvers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Caller handed in something malformed (dimension mismatch, out-of-range
    /// index, non-finite data, invalid parameter).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A documented precondition was violated (e.g. a matrix that must be
    /// symmetric is not).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// An iterative solver blew up. Carries the last finite iterate so the
    /// caller can inspect where the run stood before the blow-up.
    #[error("solver diverged at iteration {iteration}: relative residual {relative_residual:.3e}")]
    Diverged {
        iteration: usize,
        relative_residual: f64,
        last_iterate: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }
}
