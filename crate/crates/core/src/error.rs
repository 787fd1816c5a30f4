use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates the documented precondition of an operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A constructed object fails one of its structural invariants.
    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
