use thiserror::Error;

/// Errors raised by library operations.
///
/// Verification results are never reported through this type; checks return
/// report values. An `Error` means the inputs could not be processed at all.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not positive semi-definite")]
    NotPositiveSemiDefinite,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symplectic{0}")]
    NotSymplectic(String),
    #[error("characteristic set contains an odd characteristic")]
    OddCharacteristic,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible computation: {0}")]
    Infeasible(String),
    #[error("orbit search exhausted its budget of {budget} nodes")]
    BudgetExhausted { budget: usize },
    #[error("{0} requires external data not available to this library")]
    RequiresExternalData(String),
    #[error("scaling mismatch: {0}")]
    ScalingMismatch(String),
    #[error("exponent {0} lies outside the paramodular index lattice")]
    LatticeViolation(String),
    #[error("{0} is not an exact divisor of {1}")]
    NotExactDivisor(u64, u64),
    #[error("level {0} is not squarefree")]
    NotSquarefree(u64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
