use thiserror::Error;

/// Errors shared across the laboratory crates.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The requested ε cannot be resolved on the grid (too few cells across
    /// the mollifier support, or the support leaves the box).
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("numerical blowup at step {step}: {reason}")]
    Blowup { step: usize, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
