use thiserror::Error;

/// Errors raised by the pricing toolkit.
#[derive(Debug, Error)]
pub enum PricingError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("price vector rejected: {0}")]
    Price(String),

    #[error("numerical failure: {message} (residual {residual:e})")]
    Numerical { message: String, residual: f64 },

    #[error("degenerate market: {0}")]
    Degenerate(String),

    #[error("assumption A0 violated: {0}")]
    A0Violation(String),

    #[error("{field}: {message}")]
    Field { field: String, message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PricingError {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        PricingError::Field {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn numerical(message: impl Into<String>, residual: f64) -> Self {
        PricingError::Numerical {
            message: message.into(),
            residual,
        }
    }

    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            PricingError::Numerical { .. } | PricingError::Degenerate(_)
        )
    }
}

pub type Result<T, E = PricingError> = std::result::Result<T, E>;
