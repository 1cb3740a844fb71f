use thiserror::Error;

/// Errors raised anywhere in the compilation and decision pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
}

impl Error {
    pub(crate) fn overflow() -> Self {
        Error::ResourceLimit("integer overflow in coefficient arithmetic".into())
    }

    /// True for errors caused by configured caps or arithmetic width.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::ResourceLimit(_) | Error::InstanceTooLarge(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
