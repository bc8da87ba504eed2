use thiserror::Error;

use crate::group::GroupKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(GroupKind, GroupKind),
    #[error("empty set where a nonempty one is required: {0}")]
    EmptySet(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index {index} outside horizon {horizon}")]
    OutOfHorizon { index: usize, horizon: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("system is not exactly enumerable: {0}")]
    NotEnumerable(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("construction infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn overflow(what: impl Into<String>) -> Error {
    Error::Overflow(what.into())
}
