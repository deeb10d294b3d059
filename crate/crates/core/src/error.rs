use thiserror::Error;

/// Errors raised by the q-calculus operators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("{what} did not converge after {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },
}

impl QError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        QError::Domain(msg.into())
    }

    pub(crate) fn pole(msg: impl Into<String>) -> Self {
        QError::Pole(msg.into())
    }

    /// True for the numeric failures (divergence, poles) as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, QError::Pole(_) | QError::NonConvergence { .. })
    }
}

pub type QResult<T> = Result<T, QError>;
