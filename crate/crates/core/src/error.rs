use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    InvalidMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimError { expected: usize, found: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("closure loop did not stabilize within {0} iterations")]
    ClosureDiverged(usize),
    #[error("zero vector given where a non-zero vector is required")]
    ZeroVector,
    #[error("invalid time {0}")]
    InvalidTime(f64),
    #[error("rank decision is ambiguous at the current tolerance: {0}")]
    ToleranceAmbiguity(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("jump operators are not anti-selfadjoint (max |L + L*| = {0:e})")]
    NotAntiSelfAdjoint(f64),
    #[error("negative jump rate {rate} at ({from}, {to})")]
    InvalidRate { from: usize, to: usize, rate: f64 },
    #[error("grid mismatch: {0}")]
    GridError(String),
    #[error("evolved state lost positivity (min eigenvalue {0:e})")]
    BrokenExponential(f64),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// A verdict disagreement that the underlying theory rules out.
    #[error("inconsistent verdicts: {0}")]
    Inconsistent(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
