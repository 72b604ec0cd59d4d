use thiserror::Error;

/// Errors produced by construction, validation, and the numeric solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid detection model: {0}")]
    InvalidDetection(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("ground truth outside the search space: {0}")]
    TruthOutsideSpace(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "solver failed to converge after {iterations} iterations \
         (bracket [{lo:.6e}, {hi:.6e}], values [{f_lo:.6e}, {f_hi:.6e}])"
    )]
    NoConvergence {
        iterations: usize,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("brute-force search supports at most {max} cells, got {got}")]
    BruteForceTooLarge { max: usize, got: usize },

    #[error("unknown reference scenario: {0}")]
    UnknownReference(String),
}

pub type Result<T> = std::result::Result<T, Error>;
