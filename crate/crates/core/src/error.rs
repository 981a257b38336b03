use thiserror::Error;

/// Everything that can go wrong across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element outside enumeration bound {bound}")]
    BoundExceeded { bound: u64 },
    #[error("backend or dimension mismatch: {0}")]
    BackendMismatch(String),
    #[error("exact computation unsupported: {0}")]
    UnsupportedExact(String),
    #[error("unsupported homomorphism: {0}")]
    UnsupportedHom(String),
    #[error("empty convex set")]
    EmptyConvexSet,
    #[error("validation error at {location}: {message}")]
    Validation { location: String, message: String },
    #[error("duration {0} is not in the duration set")]
    UnknownDuration(u64),
    #[error("no acceptance data")]
    NoAcceptance,
    #[error("empty target set")]
    EmptyTarget,
    #[error("state budget exceeded: {count} states")]
    Budget { count: usize },
    #[error("parse error at {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("{0}")]
    Json(String),
}

impl Error {
    pub(crate) fn validation(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { location: location.into(), message: message.into() }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
