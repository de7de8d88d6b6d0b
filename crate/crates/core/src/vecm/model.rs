use serde::{Deserialize, Serialize};

use super::johansen::{differences, reduced_rank, short_run_design};
use crate::error::{Error, Result};
use crate::numerics::{ols, serde_rows, Matrix, Vector};
use crate::timeseries::Frame;
use crate::var::{SampleRange, VarFit};

const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VecmFit {
    pub names: Vec<String>,
    pub rank: usize,
    /// Lag order in levels; the model carries `k − 1` lagged differences.
    pub lags: usize,
    /// Loadings `α`, `K × r`.
    #[serde(with = "serde_rows")]
    pub alpha: Matrix,
    /// Cointegrating vectors `β`, `K × r`, identity on `normalization_rows`.
    #[serde(with = "serde_rows")]
    pub beta: Matrix,
    /// Rows of `β` set to the identity (the leading `r` rows unless that block is singular).
    pub normalization_rows: Vec<usize>,
    /// `Γ_1..Γ_{k−1}`, each `K × K`.
    #[serde(with = "serde_rows::vec")]
    pub gamma: Vec<Matrix>,
    #[serde(with = "serde_rows::vector")]
    pub constant: Vector,
    #[serde(with = "serde_rows")]
    pub residuals: Matrix,
    #[serde(with = "serde_rows")]
    pub sigma: Matrix,
    pub sample: SampleRange,
    /// Last `k` observed rows in levels, oldest first.
    #[serde(with = "serde_rows")]
    pub history: Matrix,
    pub log_likelihood: Option<f64>,
    /// Regressors `[βᵀX_{t−1}, ΔX lags, 1]` used in the final least-squares step.
    #[serde(skip)]
    pub design: Option<Matrix>,
}

impl VecmFit {
    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    /// Long-run matrix `Π = α βᵀ`.
    pub fn pi(&self) -> Matrix {
        &self.alpha * self.beta.transpose()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Domain(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid VECM JSON: {e}")))
    }
}

/// Lexicographically first row set whose `r × r` block of `beta` is well conditioned.
fn normalization_rows(beta: &Matrix) -> Result<Vec<usize>> {
    let (k, r) = beta.shape();
    let mut rows: Vec<usize> = (0..r).collect();
    loop {
        let block = beta.select_rows(&rows);
        let sv = block.singular_values();
        let (hi, lo) = (sv.max(), sv.min());
        if hi > 0.0 && lo / hi > NORMALIZATION_TOL {
            return Ok(rows);
        }
        // next combination
        let mut i = r;
        loop {
            if i == 0 {
                return Err(Error::Degenerate("no nonsingular r × r block in β".into()));
            }
            i -= 1;
            if rows[i] < k - r + i {
                rows[i] += 1;
                for j in i + 1..r {
                    rows[j] = rows[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Rank-restricted VECM with an unrestricted constant.
pub fn fit_vecm(frame: &Frame, k: usize, rank: usize) -> Result<VecmFit> {
    let nv = frame.width();
    if rank == 0 {
        return Err(Error::RankOutOfRange {
            rank,
            vars: nv,
            hint: "rank 0 means no cointegration; fit a VAR in first differences",
        });
    }
    if rank >= nv {
        return Err(Error::RankOutOfRange {
            rank,
            vars: nv,
            hint: "full rank means the levels are stationary; fit a VAR in levels",
        });
    }
    let levels = frame.to_matrix();
    let rr = reduced_rank(&levels, k)?;
    let raw = rr.eigenvectors.columns(0, rank).into_owned();
    let rows = normalization_rows(&raw)?;
    let block = raw.select_rows(&rows);
    let inv = block
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("β normalization block is singular".into()))?;
    let mut beta = raw * inv;
    for (i, &row) in rows.iter().enumerate() {
        for c in 0..rank {
            beta[(row, c)] = if i == c { 1.0 } else { 0.0 };
        }
    }

    let t_eff = rr.t_eff;
    let ect = levels.rows(k - 1, t_eff) * &beta;
    let short = short_run_design(&levels, k);
    let n_short = nv * (k - 1);
    let m = rank + n_short + 1;
    let design = Matrix::from_fn(t_eff, m, |i, c| {
        if c < rank {
            ect[(i, c)]
        } else if c < rank + n_short {
            short[(i, c - rank + 1)]
        } else {
            1.0
        }
    });
    let dy = differences(&levels, k);
    let fit = ols(&dy, &design)?;
    let coef = &fit.coefficients;
    let alpha = coef.rows(0, rank).transpose();
    let gamma = (0..k - 1)
        .map(|i| coef.rows(rank + i * nv, nv).transpose())
        .collect();
    let constant = coef.row(m - 1).transpose();
    let log_likelihood = fit.log_likelihood().ok();

    Ok(VecmFit {
        names: frame.names(),
        rank,
        lags: k,
        alpha,
        beta,
        normalization_rows: rows,
        gamma,
        constant,
        residuals: fit.residuals,
        sigma: fit.sigma,
        sample: SampleRange {
            first: frame.quarter(k),
            last: frame.end(),
            observations: t_eff,
        },
        history: levels.rows(frame.len() - k, k).into_owned(),
        log_likelihood,
        design: Some(design),
    })
}

/// Levels VAR(k) with `A_1 = Π + I + Γ_1`, `A_i = Γ_i − Γ_{i−1}`, `A_k = −Γ_{k−1}`.
pub fn vecm_to_levels_var(fit: &VecmFit) -> VarFit {
    let (nv, k) = (fit.nvars(), fit.lags);
    let zero = Matrix::zeros(nv, nv);
    let gamma = |i: usize| -> &Matrix {
        // Γ_i for 1 ≤ i ≤ k−1, zero otherwise
        if i >= 1 && i < k {
            &fit.gamma[i - 1]
        } else {
            &zero
        }
    };
    let mut coefficients = Vec::with_capacity(k);
    coefficients.push(fit.pi() + Matrix::identity(nv, nv) + gamma(1));
    for i in 2..=k {
        coefficients.push(gamma(i) - gamma(i - 1));
    }
    VarFit {
        names: fit.names.clone(),
        lag_order: k,
        coefficients,
        constant: fit.constant.clone(),
        exog_names: Vec::new(),
        exog_lags: 0,
        exog_coefficients: Matrix::zeros(nv, 0),
        residuals: fit.residuals.clone(),
        sigma: fit.sigma.clone(),
        sample: fit.sample,
        history: fit.history.clone(),
        exog_history: Matrix::zeros(0, 0),
        log_likelihood: fit.log_likelihood,
    }
}

/// Iterates `ΔX_t = μ + Π X_{t−1} + Σ Γ_i ΔX_{t−i}` from the stored history.
///
/// Works in error-correction form directly, independent of [`vecm_to_levels_var`].
pub fn forecast_vecm(fit: &VecmFit, horizon: usize) -> Result<Frame> {
    if horizon == 0 {
        return Err(Error::Domain("forecast horizon must be at least 1".into()));
    }
    let (nv, k) = (fit.nvars(), fit.lags);
    if fit.history.nrows() != k || fit.history.ncols() != nv {
        return Err(Error::Dimension(format!(
            "history is {}×{}, expected {k}×{nv}",
            fit.history.nrows(),
            fit.history.ncols()
        )));
    }
    let pi = fit.pi();
    let mut levels: Vec<Vector> = fit.history.row_iter().map(|r| r.transpose()).collect();
    let mut out = Matrix::zeros(horizon, nv);
    for h in 0..horizon {
        let n = levels.len();
        let mut dx = &fit.constant + &pi * &levels[n - 1];
        for (i, g) in fit.gamma.iter().enumerate() {
            dx += g * (&levels[n - 1 - i] - &levels[n - 2 - i]);
        }
        let next = &levels[n - 1] + dx;
        out.row_mut(h).copy_from(&next.transpose());
        levels.push(next);
    }
    Frame::from_matrix(fit.sample.last.succ(), &fit.names, &out)
}
