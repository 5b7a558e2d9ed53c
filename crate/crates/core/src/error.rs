use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input object violates one of its defining invariants.
    #[error("invalid {what}: {reason}")]
    Validation { what: &'static str, reason: String },

    /// A dense construction would exceed the configured size cap.
    #[error("dense operator of dimension {required} exceeds the allowed {allowed} (raise the cap to proceed)")]
    Resource { required: usize, allowed: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// An internal consistency check failed; indicates a bug rather than bad input.
    #[error("structural check failed: {0}")]
    Structural(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            what,
            reason: reason.into(),
        }
    }
}
