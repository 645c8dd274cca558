use thiserror::Error;

use crate::scalar::Interval;

#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension must be at least 2")]
    DimensionTooSmall,
    #[error("the anchor projector and the target span the alignment direction (residual norm is zero)")]
    DegenerateAlignment,
    #[error("alignment vector is zero")]
    ZeroVector,
    #[error("square root not representable in this scalar type")]
    SqrtUnavailable,
    #[error("interval {bracket} could not be narrowed to the requested width")]
    PrecisionExhausted { bracket: Interval },
    #[error("no positive definite fixed point: {remedy}")]
    NoPositiveEigenvector { remedy: String },
    #[error("bad subsystem grouping: {0}")]
    BadGrouping(String),
    #[error("channels are expressed in different operator bases")]
    BasisMismatch,
}

pub type Result<T> = std::result::Result<T, CoreError>;
