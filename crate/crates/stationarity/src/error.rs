//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid arguments (bad preset, out-of-range index, mismatched sizes).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Input data that cannot be processed (non-numeric rows, ties in strict
    /// mode, series too short).
    #[error("bad data: {0}")]
    Data(String),
    /// Internal contract violation, e.g. combining components that were
    /// resampled with different multiplier sequences.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code: 2 = bad arguments, 3 = bad data, 4 = contract violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::Config(_) => 2,
            Error::Data(_) | Error::Io(_) => 3,
            Error::Contract(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn data(msg: impl Into<String>) -> Error {
    Error::Data(msg.into())
}
