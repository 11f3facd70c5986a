use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("permutation is empty")]
    EmptyPermutation,

    #[error("not a permutation of 1..{n}: {reason}")]
    InvalidPermutation { n: usize, reason: String },

    #[error("n = {n} exceeds the enumeration limit {limit}")]
    LimitExceeded { n: usize, limit: usize },

    #[error("level index must be at least 1, got {0}")]
    InvalidLevel(usize),

    #[error("coefficient index {index} out of range for series of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("structural violation in A_{k}: {msg}")]
    StructuralViolation { k: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
