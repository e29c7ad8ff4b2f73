use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum BerryError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Grid spacing too coarse for the requested energy.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Evaluation outside a sampler's validity region.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BerryError>;

impl BerryError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        BerryError::InvalidArgument(msg.into())
    }
}
