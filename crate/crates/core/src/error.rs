use thiserror::Error;

/// Errors raised by the exact pipeline and the numeric layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two series carry different variable tags.
    #[error("variable mismatch: {left} vs {right}")]
    VariableMismatch { left: String, right: String },

    /// A level outside the built-in catalog was requested.
    #[error("unsupported level {level}; supported levels: {supported}")]
    UnsupportedLevel { level: u64, supported: String },

    /// A catalog level whose modular data is not available.
    #[error("level {0}: not reproducible from paper data")]
    NotReproducible(u64),

    /// An invariant that should hold by construction was violated.
    #[error("internal error: {0}")]
    Internal(String),

    /// Malformed textual input (rationals, JSON payloads).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
