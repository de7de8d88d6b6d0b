use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{chi_square_sf, cholesky_lower, ols, Matrix};
use crate::report::{sig, TextTable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmResult {
    pub lag: usize,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Breusch–Godfrey type test for residual autocorrelation at a single lag.
///
/// The residuals `U (T×K)` are regressed on the model regressors (a constant
/// when `regressors` is `None`) with and without `U_{t−lag}` (zero before the
/// sample start). With `Σ_r` and `Σ_a` the two residual covariances and `m`
/// the auxiliary regressor count, the statistic is
/// `(T − m − (K+1)/2)·(K − tr(Σ_r⁻¹ Σ_a))`, compared with `χ²(K²)`.
pub fn lm_autocorrelation(residuals: &Matrix, regressors: Option<&Matrix>, lag: usize) -> Result<LmResult> {
    let (t, k) = residuals.shape();
    if lag == 0 {
        return Err(Error::Domain("LM lag must be at least 1".into()));
    }
    if k == 0 {
        return Err(Error::Dimension("no residual columns".into()));
    }
    if residuals.iter().all(|v| *v == 0.0) {
        return Err(Error::Degenerate("residuals are identically zero".into()));
    }
    let base = match regressors {
        Some(x) if x.nrows() != t => {
            return Err(Error::Dimension(format!("regressors have {} rows, residuals {t}", x.nrows())));
        }
        Some(x) => x.clone(),
        None => Matrix::from_element(t, 1, 1.0),
    };
    let m = base.ncols() + k;
    if t <= lag || (t as f64) <= m as f64 + 0.5 * (k + 1) as f64 {
        return Err(Error::insufficient(format!("LM test at lag {lag}"), m + k + 1, t));
    }
    let aux = Matrix::from_fn(t, m, |i, c| {
        if c < base.ncols() {
            base[(i, c)]
        } else if i >= lag {
            residuals[(i - lag, c - base.ncols())]
        } else {
            0.0
        }
    });
    let restricted = ols(residuals, &base)?;
    let unrestricted = ols(residuals, &aux)?;
    let chol = cholesky_lower(&restricted.sigma)
        .map_err(|e| Error::Degenerate(format!("residual covariance is singular ({e})")))?;
    let trace = chol.solve(&unrestricted.sigma).trace();
    let scale = t as f64 - m as f64 - 0.5 * (k + 1) as f64;
    let statistic = (scale * (k as f64 - trace)).max(0.0);
    let df = k * k;
    Ok(LmResult {
        lag,
        statistic,
        df,
        p_value: chi_square_sf(statistic, df as u32)?,
    })
}

impl LmResult {
    pub fn table(results: &[LmResult]) -> TextTable {
        let mut t = TextTable::new(["Lag", "Chi2", "Df", "Prob > Chi2"]);
        for r in results {
            t.row([r.lag.to_string(), sig(r.statistic), r.df.to_string(), sig(r.p_value)]);
        }
        t.note("H0: no autocorrelation at lag order");
        t
    }
}
