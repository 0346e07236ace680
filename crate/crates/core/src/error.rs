use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("wrong regime: {0}")]
    WrongRegime(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
