use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or out-of-domain input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A configured size cap would be exceeded.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    /// An element could not be factored within the configured bounds.
    #[error("factorization bound exceeded: {0}")]
    FactorizationBound(String),
    /// A mathematical invariant failed to hold; signals a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// The requested object has no algorithm at this scope.
    #[error("not computable: {0}")]
    NotComputable(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True when the failure is the caller's fault rather than an internal inconsistency.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
