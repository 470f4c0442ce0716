//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("capacity exceeded: {what} needs {needed} entries, budget is {budget}")]
    Capacity { what: String, needed: String, budget: u128 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("channel spec: {0}")]
    ChannelSpec(String),
    #[error("cache format: {0}")]
    CacheFormat(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
