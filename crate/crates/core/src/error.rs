use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("{what} = {value} is out of range ({expected})")]
    Bounds {
        what: &'static str,
        value: usize,
        expected: String,
    },

    #[error("{op} did not converge on a {rows}x{cols} matrix")]
    NoConvergence {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("{factor} is singular or rank-deficient (smallest singular value {smallest:.3e}, tolerance {tolerance:.3e})")]
    Singular {
        factor: String,
        smallest: f64,
        tolerance: f64,
    },

    #[error("DEIM basis is numerically dependent at step {step} (condition number {condition:.3e})")]
    DependentBasis { step: usize, condition: f64 },

    #[error("contract violation in {op}: {detail}")]
    Contract { op: &'static str, detail: String },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    pub(crate) fn dimension(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn bounds(what: &'static str, value: usize, expected: impl Into<String>) -> Self {
        Error::Bounds {
            what,
            value,
            expected: expected.into(),
        }
    }

    /// Renames the factor reported by a [`Error::Singular`]; other variants pass through.
    pub fn naming(self, factor: &str) -> Self {
        match self {
            Error::Singular {
                smallest,
                tolerance,
                ..
            } => Error::Singular {
                factor: factor.to_string(),
                smallest,
                tolerance,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
