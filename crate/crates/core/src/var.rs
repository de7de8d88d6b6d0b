//! Vector autoregressions `X_t = C + A_1 X_{t−1} + … + A_p X_{t−p} + B Z_t + ε_t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eigen_moduli, ols, serde_rows, Matrix, Vector};
use crate::timeseries::{Frame, QuarterIndex};

/// Exogenous regressors, indexed by quarter so that the same block can cover
/// both the estimation sample and a forecast window.
#[derive(Debug, Clone)]
pub struct ExogenousBlock {
    pub data: Frame,
    /// Number of exogenous lags beyond the contemporaneous value.
    pub lags: usize,
}

impl ExogenousBlock {
    pub fn contemporaneous(data: Frame) -> Self {
        Self { data, lags: 0 }
    }

    pub fn with_lags(mut self, lags: usize) -> Self {
        self.lags = lags;
        self
    }
}

/// Estimation window of a fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRange {
    pub first: QuarterIndex,
    pub last: QuarterIndex,
    pub observations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarFit {
    pub names: Vec<String>,
    pub lag_order: usize,
    /// `A_1..A_p`, each `K × K` (row = equation).
    #[serde(with = "serde_rows::vec")]
    pub coefficients: Vec<Matrix>,
    #[serde(with = "serde_rows::vector")]
    pub constant: Vector,
    #[serde(default)]
    pub exog_names: Vec<String>,
    #[serde(default)]
    pub exog_lags: usize,
    /// `K × (n_exog · (exog_lags + 1))`; block `j` holds the lag-`j` coefficients.
    #[serde(with = "serde_rows")]
    pub exog_coefficients: Matrix,
    #[serde(with = "serde_rows")]
    pub residuals: Matrix,
    #[serde(with = "serde_rows")]
    pub sigma: Matrix,
    pub sample: SampleRange,
    /// Last `p` observed rows in levels of the modelled data, oldest first.
    #[serde(with = "serde_rows")]
    pub history: Matrix,
    /// Last `exog_lags` exogenous rows of the sample, oldest first.
    #[serde(with = "serde_rows")]
    pub exog_history: Matrix,
    /// `None` when the residual covariance is singular.
    pub log_likelihood: Option<f64>,
}

impl VarFit {
    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Domain(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid VAR model JSON: {e}")))
    }
}

/// Regressor matrix `[1, X_{t−1}, …, X_{t−p}]` for rows `first..T` of `levels`.
pub(crate) fn lagged_design(levels: &Matrix, p: usize, first: usize) -> Matrix {
    let k = levels.ncols();
    let n = levels.nrows() - first;
    Matrix::from_fn(n, 1 + k * p, |i, c| {
        if c == 0 {
            1.0
        } else {
            let (lag, var) = ((c - 1) / k + 1, (c - 1) % k);
            levels[(first + i - lag, var)]
        }
    })
}

fn exog_row(block: &ExogenousBlock, quarter: QuarterIndex) -> Result<Vec<f64>> {
    let row = block
        .data
        .row_of(quarter)
        .ok_or_else(|| Error::Coverage(quarter.to_string()))?;
    Ok(block.data.row(row))
}

/// Least-squares VAR(p) with a constant and optional exogenous regressors.
pub fn fit_var(frame: &Frame, p: usize, exog: Option<&ExogenousBlock>) -> Result<VarFit> {
    if p == 0 {
        return Err(Error::Domain("VAR lag order must be at least 1".into()));
    }
    let (t, k) = (frame.len(), frame.width());
    let (n_exog, q) = exog.map_or((0, 0), |b| (b.data.width(), b.lags));
    let n_exog_cols = n_exog * (q + 1);
    let m = 1 + k * p + n_exog_cols;
    if t <= p || t - p <= m {
        return Err(Error::insufficient(
            format!("VAR({p}) with {k} variables and {n_exog_cols} exogenous terms"),
            p + m + 1,
            t,
        ));
    }
    let levels = frame.to_matrix();
    let y = levels.rows(p, t - p).into_owned();
    let mut x = lagged_design(&levels, p, p);

    let mut exog_rows: Vec<Vec<f64>> = Vec::new();
    if let Some(block) = exog {
        // rows for quarters start+p−q ..= end
        for i in 0..(t - p + q) {
            let quarter = frame.quarter(p + i).offset(-(q as i64));
            exog_rows.push(exog_row(block, quarter)?);
        }
        let z = Matrix::from_fn(t - p, n_exog_cols, |i, c| {
            let (lag, var) = (c / n_exog, c % n_exog);
            exog_rows[i + q - lag][var]
        });
        x = x.resize_horizontally(m, 0.0);
        x.columns_mut(1 + k * p, n_exog_cols).copy_from(&z);
    }

    // identically-zero exogenous columns carry no information; leave them out
    let keep: Vec<usize> = (0..m)
        .filter(|&c| c <= k * p || x.column(c).iter().any(|v| *v != 0.0))
        .collect();
    let x_used = x.select_columns(&keep);
    let fit = ols(&y, &x_used)?;
    let mut coef = Matrix::zeros(m, k);
    for (row, &c) in keep.iter().enumerate() {
        coef.row_mut(c).copy_from(&fit.coefficients.row(row));
    }

    let coefficients = (0..p)
        .map(|lag| coef.rows(1 + lag * k, k).transpose())
        .collect();
    let exog_coefficients = coef.rows(1 + k * p, n_exog_cols).transpose();
    let exog_history = Matrix::from_fn(q, n_exog, |i, j| exog_rows[t - p + i][j]);
    let log_likelihood = fit.log_likelihood().ok();

    Ok(VarFit {
        names: frame.names(),
        lag_order: p,
        coefficients,
        constant: coef.row(0).transpose(),
        exog_names: exog.map(|b| b.data.names()).unwrap_or_default(),
        exog_lags: q,
        exog_coefficients,
        residuals: fit.residuals,
        sigma: fit.sigma,
        sample: SampleRange {
            first: frame.quarter(p),
            last: frame.end(),
            observations: t - p,
        },
        history: levels.rows(t - p, p).into_owned(),
        exog_history,
        log_likelihood,
    })
}

/// `(K·p) × (K·p)` companion matrix with `A_1..A_p` in the first block row.
pub fn companion_matrix(fit: &VarFit) -> Matrix {
    let (k, p) = (fit.nvars(), fit.lag_order);
    let mut c = Matrix::zeros(k * p, k * p);
    for (i, a) in fit.coefficients.iter().enumerate() {
        c.view_mut((0, i * k), (k, k)).copy_from(a);
    }
    for i in k..k * p {
        c[(i, i - k)] = 1.0;
    }
    c
}

/// Descending moduli of the companion eigenvalues.
pub fn stability_moduli(fit: &VarFit) -> Result<Vec<f64>> {
    eigen_moduli(&companion_matrix(fit))
}

/// Iterated point forecasts for `horizon` quarters after the sample end.
///
/// Exogenous values for future quarters are looked up in `exog_path`.
pub fn forecast_var(fit: &VarFit, horizon: usize, exog_path: Option<&Frame>) -> Result<Frame> {
    if horizon == 0 {
        return Err(Error::Domain("forecast horizon must be at least 1".into()));
    }
    let (k, p, q) = (fit.nvars(), fit.lag_order, fit.exog_lags);
    let n_exog = fit.exog_names.len();
    let last = fit.sample.last;

    let future_exog = |quarter: QuarterIndex| -> Result<Vec<f64>> {
        let path = exog_path.ok_or_else(|| Error::Coverage(quarter.to_string()))?;
        let row = path
            .row_of(quarter)
            .ok_or_else(|| Error::Coverage(quarter.to_string()))?;
        fit.exog_names
            .iter()
            .map(|n| Ok(path.column(n)?.values()[row]))
            .collect()
    };
    // exogenous rows from quarter last−q+1 onward
    let mut z: Vec<Vec<f64>> = fit.exog_history.row_iter().map(|r| r.iter().copied().collect()).collect();
    if n_exog > 0 {
        for h in 1..=horizon {
            z.push(future_exog(last.offset(h as i64))?);
        }
    }

    let mut path: Vec<Vector> = fit.history.row_iter().map(|r| r.transpose()).collect();
    let mut out = Matrix::zeros(horizon, k);
    for h in 0..horizon {
        let mut next = fit.constant.clone();
        for (i, a) in fit.coefficients.iter().enumerate() {
            next += a * &path[path.len() - 1 - i];
        }
        if n_exog > 0 {
            for lag in 0..=q {
                let zrow = &z[q + h - lag];
                let b = fit.exog_coefficients.columns(lag * n_exog, n_exog);
                next += b * Vector::from_column_slice(zrow);
            }
        }
        out.row_mut(h).copy_from(&next.transpose());
        path.push(next);
        if path.len() > p {
            path.remove(0);
        }
    }
    Frame::from_matrix(last.succ(), &fit.names, &out)
}
