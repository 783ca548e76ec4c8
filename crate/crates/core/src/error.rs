use thiserror::Error;

use crate::board::Position;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field elements of different order: k={0} and k={1}")]
    OrderMismatch(usize, usize),

    #[error("position has dimension {got}, board has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("illegal move: cell {cell} is empty")]
    IllegalMove { cell: Position },

    #[error("replay failed at move {index}: cell {cell} is empty")]
    ReplayFailed { index: usize, cell: Position },

    #[error("expected a positive value")]
    NonPositive,

    #[error("element is not invertible")]
    NotInvertible,

    #[error("malformed trace at line {line}: {message}")]
    TraceFormat { line: usize, message: String },

    #[error("claim not satisfied: {0}")]
    ClaimFailed(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
