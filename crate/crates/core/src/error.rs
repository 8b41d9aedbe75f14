use thiserror::Error;

/// Errors raised anywhere in this crate.
#[derive(Debug, Error)]
pub enum SdrError {
    #[error("empty sample")]
    EmptySample,

    #[error("non-finite matrix")]
    NonFiniteMatrix,

    #[error("non-finite value in point {index}")]
    NonFiniteInput { index: usize },

    #[error("zero covariance")]
    ZeroCovariance,

    #[error("covariance is not positive semidefinite (smallest eigenvalue {min_eigenvalue})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("all points filtered out at level {level} (threshold {threshold})")]
    AllFilteredOut { level: usize, threshold: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SdrError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        SdrError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        SdrError::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, SdrError>;
