//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("trace is empty")]
    EmptyTrace,

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error("unsupported format version {found} (this build reads version {expected})")]
    Version { found: u16, expected: u16 },

    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },

    #[error("training aborted: {0}")]
    Training(String),

    #[error("prediction failed at access {index}: {msg}")]
    Prediction { index: usize, msg: String },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArg(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
