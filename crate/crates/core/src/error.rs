use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field of order {p}^{e} exceeds the size limit {limit}")]
    FieldTooLarge { p: u64, e: u32, limit: u64 },

    #[error("inverse of zero")]
    ZeroInverse,

    #[error("operands belong to different fields")]
    FieldMismatch,

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subspace is not invariant under the matrix")]
    NotInvariant,

    #[error("invalid group specification: {0}")]
    InvalidSpec(String),

    #[error("group order {order} exceeds cap {cap}")]
    CapExceeded { order: String, cap: u64 },

    #[error("closure did not reach the group order after {attempts} generating sets")]
    ClosureStagnation { attempts: usize },

    #[error("element is not in Q_k")]
    NotClassified,

    #[error("exponent does not annihilate the element")]
    NotAnnihilating,

    #[error("structural check failed: {0}")]
    Structural(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
