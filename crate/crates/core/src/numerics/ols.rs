use super::{log_det, Matrix};
use crate::error::{Error, Result};

/// Relative threshold on `|R_ii|` below which a design column is treated as
/// linearly dependent on the preceding ones.
const RANK_TOL: f64 = 1e-10;

/// Multivariate least-squares fit of `Y (T×K)` on `X (T×m)`.
#[derive(Debug, Clone)]
pub struct OlsFit {
    /// `m × K`, one column per equation.
    pub coefficients: Matrix,
    /// `T × K`, `Y − X·coefficients`.
    pub residuals: Matrix,
    /// Residual covariance with divisor `T`.
    pub sigma: Matrix,
    /// `(XᵀX)⁻¹`, kept for standard errors.
    pub xtx_inv: Matrix,
}

impl OlsFit {
    pub fn nobs(&self) -> usize {
        self.residuals.nrows()
    }

    pub fn nregressors(&self) -> usize {
        self.coefficients.nrows()
    }

    /// Gaussian log-likelihood `−(T/2)(K ln 2π + K + ln|Σ|)`.
    ///
    /// Fails with [`Error::Degenerate`] when `Σ` is singular (e.g. an exact fit).
    pub fn log_likelihood(&self) -> Result<f64> {
        gaussian_log_likelihood(&self.sigma, self.nobs())
    }

    /// Conventional standard errors, `m × K`, with divisor `T − m`.
    pub fn std_errors(&self) -> Matrix {
        let (t, m) = (self.nobs(), self.nregressors());
        let dof = (t - m) as f64;
        Matrix::from_fn(m, self.residuals.ncols(), |i, k| {
            let rss = self.residuals.column(k).norm_squared();
            (rss / dof * self.xtx_inv[(i, i)]).sqrt()
        })
    }
}

pub(crate) fn gaussian_log_likelihood(sigma: &Matrix, t: usize) -> Result<f64> {
    let k = sigma.nrows() as f64;
    let ld = log_det(sigma).map_err(|e| {
        Error::Degenerate(format!("residual covariance is singular, log-likelihood undefined ({e})"))
    })?;
    let t = t as f64;
    Ok(-(t / 2.0) * (k * (2.0 * std::f64::consts::PI).ln() + k + ld))
}

/// Equation-by-equation least squares via Householder QR.
pub fn ols(y: &Matrix, x: &Matrix) -> Result<OlsFit> {
    let (t, m) = x.shape();
    if y.nrows() != t {
        return Err(Error::Dimension(format!("Y has {} rows, X has {t}", y.nrows())));
    }
    if m == 0 {
        return Err(Error::Dimension("design has no columns".into()));
    }
    if t <= m {
        return Err(Error::insufficient("least squares (rows must exceed regressors)", m + 1, t));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite entry in least-squares input".into()));
    }

    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..m).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if let Some(col) = (0..m).find(|&i| r[(i, i)].abs() <= RANK_TOL * scale.max(f64::MIN_POSITIVE)) {
        return Err(Error::SingularDesign(format!(
            "regressor column {col} is (nearly) collinear with earlier columns"
        )));
    }
    let q = qr.q();
    let qty = q.transpose() * y;
    let coefficients = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularDesign("triangular solve failed".into()))?;
    let r_inv = r
        .solve_upper_triangular(&Matrix::identity(m, m))
        .ok_or_else(|| Error::SingularDesign("triangular inverse failed".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let residuals = y - x * &coefficients;
    let sigma = residual_covariance(&residuals);
    Ok(OlsFit {
        coefficients,
        residuals,
        sigma,
        xtx_inv,
    })
}

/// `UᵀU / T`, symmetrized.
pub(crate) fn residual_covariance(residuals: &Matrix) -> Matrix {
    let t = residuals.nrows() as f64;
    let s = residuals.transpose() * residuals / t;
    (&s + s.transpose()) * 0.5
}
