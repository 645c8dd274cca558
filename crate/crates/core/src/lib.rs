//! Exact and certified linear algebra over Hermitian matrices and linear
//! maps on them: scalars, matrices, eigenvalue certificates, operator bases,
//! channels, and Perron fixed points.

pub mod basis;
pub mod channels;
pub mod eigen;
pub mod error;
pub mod matrix;
pub mod minors;
pub mod perron;
pub mod scalar;

pub use basis::{Alignment, HermitianBasis};
pub use channels::{Channel, CpVerdict};
pub use error::{CoreError, Result};
pub use matrix::{CMatrix, Matrix};
pub use scalar::{Complex, Dyadic, Interval, Rational, RealField, Surd};

/// Exact complex-rational matrices.
pub type QMatrix = CMatrix<Rational>;
/// Complex matrices over the multiquadratic field.
pub type SMatrix = CMatrix<Surd>;
/// Complex interval matrices.
pub type IMatrix = CMatrix<Interval>;
/// Complex floating-point matrices, for heuristics only.
pub type FMatrix = CMatrix<f64>;
