use thiserror::Error;

/// Rejected inputs to the exterior-calculus layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree {degree} exceeds dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("unsupported dimension {0}; expected 3 or 4")]
    UnsupportedDimension(usize),
    #[error("component index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("component tuple has length {got}, form degree is {expected}")]
    WrongTupleLength { expected: usize, got: usize },
    #[error("metric is not symmetric positive-definite")]
    NotPositiveDefinite,
    #[error("orientation must be +1 or -1, got {0}")]
    BadOrientation(i8),
    #[error("sqrt(det g) is irrational; exact Hodge star unavailable for this metric")]
    IrrationalVolume,
    #[error("operation requires degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("coefficients are not homogeneous")]
    NotHomogeneous,
}
