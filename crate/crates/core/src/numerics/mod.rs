//! Dense linear algebra and distribution primitives used by the estimators.

mod chisq;
mod decomp;
mod ols;
pub mod serde_rows;

pub use chisq::{chi_square_cdf, chi_square_sf};
pub use decomp::{
    cholesky_lower, eigen_moduli, generalized_symmetric_eigen, log_det, CholeskyFactor, GeneralizedEigenResult,
};
pub use ols::{ols, OlsFit};

pub type Matrix = nalgebra::DMatrix<f64>;
pub type Vector = nalgebra::DVector<f64>;

/// Largest absolute entry, or zero for an empty matrix.
pub(crate) fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}
