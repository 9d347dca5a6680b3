use thiserror::Error;

/// Errors produced by the analysis, solver, and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity {capacity} must be smaller than {limit} for this equation")]
    CapacityTooLarge { capacity: usize, limit: usize },

    #[error("solver did not converge after {iterations} iterations; last bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("markov chain has {states} states, above the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
