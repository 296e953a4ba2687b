use thiserror::Error;

/// Errors raised by the toolkit.
///
/// `Contract` covers precondition violations (bad dimensions, non-Hermitian
/// input, out-of-range parameters). `Unsupported` is returned when an exact
/// route was requested for a state outside the class it covers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("state file: {0}")]
    StateFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
