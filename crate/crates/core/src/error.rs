use std::io;

/// Errors raised by the codecs, the restoration engine and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("stream error{}: {msg}", block.map(|(x, y)| format!(" at block ({x}, {y})")).unwrap_or_default())]
    Stream {
        msg: String,
        /// Pixel origin of the block being decoded, when known.
        block: Option<(usize, usize)>,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn stream(msg: impl Into<String>) -> Self {
        Error::Stream { msg: msg.into(), block: None }
    }

    /// Attaches a block origin to a stream error; other variants pass through.
    pub fn at_block(self, x: usize, y: usize) -> Self {
        match self {
            Error::Stream { msg, block: None } => Error::Stream { msg, block: Some((x, y)) },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
