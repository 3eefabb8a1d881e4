//! Exact arithmetic in real quadratic orders and spectral data of small integer matrices.

mod field;
mod matrix;
mod quadratic;
mod spectrum;

pub use field::FieldNumber;
pub use matrix::{IntegerMatrix, MAX_DIM};
pub use quadratic::{fibonacci, AlgebraicNumber, QuadraticOrder};
pub use spectrum::{eigen_residual, eigenvalues, lyapunov_spectrum, spectral_data, SpectralData};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("elements belong to different quadratic orders")]
    OrderMismatch,
    #[error("invalid quadratic order (t = {trace}, n = {norm}): {reason}")]
    InvalidOrder { trace: i64, norm: i64, reason: &'static str },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("matrix dimension {0} outside 1..=8")]
    Dimension(usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix {0} is not primitive")]
    NotPrimitive(String),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}
