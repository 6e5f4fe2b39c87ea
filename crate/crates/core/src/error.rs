use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("trace is {0}, expected 1")]
    Trace(f64),
    #[error("effects do not sum to identity (max deviation {0:e})")]
    Incomplete(f64),
    #[error("channel is not trace preserving (max deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("operation requires a {expected} game, got {found}")]
    GameKind { expected: String, found: String },
    #[error("search space of {size} candidates exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
