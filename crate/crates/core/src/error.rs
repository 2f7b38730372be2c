use std::io;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A text table could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A binary file carries the wrong tag or magic, or bad header values.
    #[error("format error: {0}")]
    Format(String),

    /// A binary payload is shorter or longer than its header declares.
    #[error("length error: expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },

    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration, scene spec or metadata.
    #[error("config error: {0}")]
    Config(String),

    /// A per-frame input file is absent.
    #[error("frame {frame}: missing {path}")]
    MissingFrame { frame: u32, path: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
