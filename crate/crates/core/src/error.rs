use thiserror::Error;

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    /// A parameter violates its domain; `name` is the unit-suffixed config key.
    #[error("invalid value for {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{0}")]
    Domain(String),

    #[error("failed to read config {path}: {reason}")]
    Io { path: String, reason: String },

    #[error("malformed config at {path}: {reason}")]
    Parse { path: String, reason: String },
}

impl ModelError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(reason: impl Into<String>) -> Self {
        ModelError::Domain(reason.into())
    }
}
