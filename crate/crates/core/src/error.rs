use thiserror::Error;

/// Errors raised by the pricing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EpsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate distribution: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
}

pub type Result<T> = std::result::Result<T, EpsError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(EpsError::InvalidInput(msg.into()))
}
