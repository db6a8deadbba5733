use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by parsing, validation, queries, and index I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// The input text does not follow the expected format.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// The input is well-formed but violates a semantic constraint.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A position or window falls outside the sequence.
    #[error("window {start}..={end} out of range for sequence of length {len}")]
    WindowOutOfRange {
        start: usize,
        end: usize,
        len: usize,
    },

    /// A stored index blob is truncated, corrupt, or has the wrong version.
    #[error("invalid index data: {0}")]
    IndexFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::IndexFormat(msg.into())
    }
}
