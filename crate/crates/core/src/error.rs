//! Error type shared by the solver and simulation routines.

use thiserror::Error;

/// Errors produced by scenario validation, solvers and simulators.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is out of range or inconsistent
    /// (non-positive counts, mismatched vector lengths, invalid grids...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No unit-modulus reflection vector satisfies the power constraint,
    /// or an iterative feasibility search gave up.
    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),

    /// The per-iteration surrogate constraint cannot be met for any
    /// multiplier, which indicates an infeasible or degenerate instance.
    #[error("surrogate constraint infeasible: {0}")]
    SurrogateInfeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::InfeasibleScenario(msg.into())
    }
}
