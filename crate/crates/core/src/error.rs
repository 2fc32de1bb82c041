use thiserror::Error;

use crate::smw::ConditionReport;

/// Errors produced by tensor operations.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("invalid shape: dims {dims:?} need {expected} entries, got {got}")]
    InvalidShape {
        dims: (usize, usize, usize),
        expected: usize,
        got: usize,
    },

    #[error("non-finite entry {value} at flat index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("dimensions must be positive, got {0:?}")]
    ZeroDimension((usize, usize, usize)),

    /// A Fourier face is singular (or numerically so) where an inverse was required.
    #[error("{operand} is singular: Fourier face {face} has smallest singular value {sigma_min:e}")]
    SingularTensor {
        operand: &'static str,
        face: usize,
        sigma_min: f64,
    },

    /// The inverse DFT of a face set left a non-negligible imaginary part.
    #[error("imaginary residual {residual:e} exceeds limit {limit:e}; face set is not conjugate-symmetric")]
    ImaginaryResidualExceeded { residual: f64, limit: f64 },

    #[error("SMW conditions not satisfied (worst residual {:e})", .0.worst())]
    ConditionsNotSatisfied(Box<ConditionReport>),

    #[error("infeasible dimensions: {0}")]
    InfeasibleDims(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TensorError> = std::result::Result<T, E>;

pub(crate) fn mismatch(
    op: &'static str,
    expected: impl std::fmt::Display,
    got: impl std::fmt::Display,
) -> TensorError {
    TensorError::DimensionMismatch {
        op,
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
