use std::cmp::Ordering;

use nalgebra::SymmetricEigen;

use super::{max_abs, Matrix};
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-8;
const PIVOT_TOL: f64 = 1e-12;

/// Lower-triangular `L` with `L·Lᵀ = A`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: Matrix,
}

impl CholeskyFactor {
    pub fn l(&self) -> &Matrix {
        &self.l
    }

    pub fn into_inner(self) -> Matrix {
        self.l
    }

    /// `ln|A| = 2 Σ ln L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.l.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// Solves `L x = b`.
    pub fn solve_lower(&self, b: &Matrix) -> Matrix {
        self.l
            .solve_lower_triangular(b)
            .expect("cholesky factor has a positive diagonal")
    }

    /// Solves `Lᵀ x = b`.
    pub fn solve_upper(&self, b: &Matrix) -> Matrix {
        self.l
            .transpose()
            .solve_upper_triangular(b)
            .expect("cholesky factor has a positive diagonal")
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &Matrix) -> Matrix {
        self.solve_upper(&self.solve_lower(b))
    }
}

fn check_symmetric(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("{}×{} matrix is not square", a.nrows(), a.ncols())));
    }
    let tol = SYMMETRY_TOL * max_abs(a).max(1.0);
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let gap = (a[(i, j)] - a[(j, i)]).abs();
            if gap > tol {
                return Err(Error::NotSymmetric(format!("|a[{i},{j}] − a[{j},{i}]| = {gap:e}")));
            }
        }
    }
    Ok(())
}

/// Cholesky factorization of a symmetric positive-definite matrix.
///
/// Pivots `≤ 1e−12` are rejected and reported by index.
pub fn cholesky_lower(a: &Matrix) -> Result<CholeskyFactor> {
    check_symmetric(a)?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }
    let n = a.nrows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= PIVOT_TOL {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            // use the lower triangle only
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(CholeskyFactor { l })
}

pub fn log_det(a: &Matrix) -> Result<f64> {
    Ok(cholesky_lower(a)?.log_det())
}

/// Solution of `A v = λ B v` with eigenvalues sorted descending.
///
/// Eigenvectors are `B`-orthonormal: `VᵀBV = I`.
#[derive(Debug, Clone)]
pub struct GeneralizedEigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

pub fn generalized_symmetric_eigen(a: &Matrix, b: &Matrix) -> Result<GeneralizedEigenResult> {
    check_symmetric(a)?;
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!("A is {:?}, B is {:?}", a.shape(), b.shape())));
    }
    let chol = cholesky_lower(b)?;
    // C = L⁻¹ A L⁻ᵀ
    let la = chol.solve_lower(a);
    let c = chol.solve_lower(&la.transpose());
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(Ordering::Equal)
    });
    let w = Matrix::from_fn(a.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    let eigenvectors = chol.solve_upper(&w);
    Ok(GeneralizedEigenResult {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        eigenvectors,
    })
}

/// Moduli of all (possibly complex) eigenvalues, descending.
pub fn eigen_moduli(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("{}×{} matrix is not square", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let mut moduli: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|x, y| y.total_cmp(x));
    Ok(moduli)
}
