use thiserror::Error;

/// Errors raised by the library. Refusals that are part of a decision
/// (for example "not periodic") are returned as values, not errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PstError {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid edge ({u}, {v}): {reason}")]
    InvalidEdge { u: usize, v: usize, reason: String },
    #[error("matrix does not match the graph: {0}")]
    PatternMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid pair: {0}")]
    InvalidPair(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("support has {0} eigenvalues, more than the enumeration limit of 20")]
    TooManyPartitions(usize),
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("permutation is not an automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("degenerate pair: {0}")]
    DegeneratePair(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("no pair: {0}")]
    NoPair(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, PstError>;
