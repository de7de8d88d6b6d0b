use serde::{Deserialize, Serialize};

use super::critical::TraceCriticalValues;
use crate::error::{Error, Result};
use crate::numerics::{cholesky_lower, generalized_symmetric_eigen, ols, serde_rows, Matrix};
use crate::report::{sig, TextTable};
use crate::timeseries::{Frame, QuarterIndex};

/// Eigenvalues are clamped below one so that `ln(1 − λ)` stays finite.
const MAX_EIGENVALUE: f64 = 1.0 - f64::EPSILON;

/// Output of the reduced-rank regression shared by the test and the estimator.
pub(crate) struct ReducedRank {
    pub eigenvalues: Vec<f64>,
    /// `K × K`, `S11`-orthonormal, column-aligned with `eigenvalues`.
    pub eigenvectors: Matrix,
    pub s00: Matrix,
    pub t_eff: usize,
}

/// Short-run regressors `[1, ΔX_{t−1}, …, ΔX_{t−k+1}]` for rows `t = k..T`.
pub(crate) fn short_run_design(levels: &Matrix, k: usize) -> Matrix {
    let (t, nv) = levels.shape();
    let n = t - k;
    Matrix::from_fn(n, 1 + nv * (k - 1), |i, c| {
        if c == 0 {
            1.0
        } else {
            let (lag, var) = ((c - 1) / nv + 1, (c - 1) % nv);
            let row = k + i - lag;
            levels[(row, var)] - levels[(row - 1, var)]
        }
    })
}

pub(crate) fn differences(levels: &Matrix, k: usize) -> Matrix {
    let (t, nv) = levels.shape();
    Matrix::from_fn(t - k, nv, |i, j| levels[(k + i, j)] - levels[(k + i - 1, j)])
}

pub(crate) fn reduced_rank(levels: &Matrix, k: usize) -> Result<ReducedRank> {
    if k == 0 {
        return Err(Error::Domain("Johansen lag order must be at least 1".into()));
    }
    let (t, nv) = levels.shape();
    let needed = nv * k + 1;
    if t <= k || t - k < needed + 1 {
        return Err(Error::insufficient(
            format!("Johansen test with {nv} variables and {k} lags"),
            k + needed + 1,
            t,
        ));
    }
    let t_eff = t - k;
    let z2 = short_run_design(levels, k);
    let z0 = differences(levels, k);
    let z1 = levels.rows(k - 1, t_eff).into_owned();
    let r0 = ols(&z0, &z2)?.residuals;
    let r1 = ols(&z1, &z2)?.residuals;
    let n = t_eff as f64;
    let s00 = r0.transpose() * &r0 / n;
    let s01 = r0.transpose() * &r1 / n;
    let s11 = r1.transpose() * &r1 / n;
    let s00 = (&s00 + s00.transpose()) * 0.5;
    let s11 = (&s11 + s11.transpose()) * 0.5;

    let chol00 = cholesky_lower(&s00).map_err(|e| Error::Degenerate(format!("S00 is singular ({e})")))?;
    let a = s01.transpose() * chol00.solve(&s01);
    let a = (&a + a.transpose()) * 0.5;
    let eig = generalized_symmetric_eigen(&a, &s11)
        .map_err(|e| Error::Degenerate(format!("S11 is singular ({e})")))?;
    let eigenvalues = eig
        .eigenvalues
        .iter()
        .map(|l| l.clamp(0.0, MAX_EIGENVALUE))
        .collect();
    Ok(ReducedRank {
        eigenvalues,
        eigenvectors: eig.eigenvectors,
        s00,
        t_eff,
    })
}

/// `trace_r = −T_eff Σ_{i>r} ln(1 − λ_i)` for `r = 0..K−1`.
pub fn trace_from_eigenvalues(eigenvalues: &[f64], t_eff: usize) -> Vec<f64> {
    let n = t_eff as f64;
    (0..eigenvalues.len())
        .map(|r| -n * eigenvalues[r..].iter().map(|l| (1.0 - l).ln()).sum::<f64>())
        .collect()
}

/// Smallest `r` whose trace statistic falls below the critical value for
/// `K − r`; `K` when every null is rejected.
pub fn select_rank(trace: &[f64], critical: &TraceCriticalValues) -> Result<usize> {
    let k = trace.len();
    for (r, &stat) in trace.iter().enumerate() {
        let cv = critical.get(k - r).ok_or_else(|| {
            Error::Domain(format!("no critical value tabulated for K − r = {}", k - r))
        })?;
        if stat < cv {
            return Ok(r);
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JohansenResult {
    pub names: Vec<String>,
    pub eigenvalues: Vec<f64>,
    /// Unnormalized cointegrating vectors, one column per eigenvalue.
    #[serde(with = "serde_rows")]
    pub eigenvectors: Matrix,
    /// Indexed by the null rank `r = 0..K−1`.
    pub trace_statistics: Vec<f64>,
    /// 5% critical values aligned with `trace_statistics`.
    pub critical_values: Vec<Option<f64>>,
    /// Maximized log-likelihood for `r = 0..=K`.
    pub log_likelihoods: Vec<f64>,
    /// Free parameters for `r = 0..=K`.
    pub parameters: Vec<usize>,
    pub selected_rank: Option<usize>,
    pub t_eff: usize,
    pub lags: usize,
    pub deterministic: String,
    pub sample_first: QuarterIndex,
    pub sample_last: QuarterIndex,
}

/// Johansen trace test with an unrestricted constant; `k` is the lag order in levels.
pub fn johansen_trace(frame: &Frame, k: usize) -> Result<JohansenResult> {
    let levels = frame.to_matrix();
    let rr = reduced_rank(&levels, k)?;
    let nv = frame.width();
    let trace_statistics = trace_from_eigenvalues(&rr.eigenvalues, rr.t_eff);
    let critical = TraceCriticalValues::five_percent();
    let critical_values = (0..nv).map(|r| critical.get(nv - r)).collect();
    let selected_rank = select_rank(&trace_statistics, &critical).ok();

    let n = rr.t_eff as f64;
    let base = nv as f64 * (1.0 + (2.0 * std::f64::consts::PI).ln()) + rr.s00.determinant().ln();
    let mut log_likelihoods = Vec::with_capacity(nv + 1);
    let mut acc = 0.0;
    for r in 0..=nv {
        if r > 0 {
            acc += (1.0 - rr.eigenvalues[r - 1]).ln();
        }
        log_likelihoods.push(-n / 2.0 * (base + acc));
    }
    let parameters = (0..=nv).map(|r| nv * nv * (k - 1) + nv + r * (2 * nv - r)).collect();

    Ok(JohansenResult {
        names: frame.names(),
        eigenvalues: rr.eigenvalues,
        eigenvectors: rr.eigenvectors,
        trace_statistics,
        critical_values,
        log_likelihoods,
        parameters,
        selected_rank,
        t_eff: rr.t_eff,
        lags: k,
        deterministic: "constant".into(),
        sample_first: frame.quarter(k),
        sample_last: frame.end(),
    })
}

impl JohansenResult {
    /// Table with one row per maximum rank, the selected rank starred.
    pub fn to_table(&self) -> TextTable {
        let mut t = TextTable::new([
            "Maximum Rank",
            "Parameters",
            "Log Likelihood",
            "Eigenvalue",
            "Trace Statistic",
            "5% Critical Value",
        ]);
        let k = self.eigenvalues.len();
        for r in 0..=k {
            let eig = if r == 0 { String::new() } else { sig(self.eigenvalues[r - 1]) };
            let (trace, cv) = if r < k {
                let star = if self.selected_rank == Some(r) { "*" } else { "" };
                (
                    format!("{}{star}", sig(self.trace_statistics[r])),
                    self.critical_values[r].map(sig).unwrap_or_else(|| "n/a".into()),
                )
            } else {
                (String::new(), String::new())
            };
            t.row([
                r.to_string(),
                self.parameters[r].to_string(),
                sig(self.log_likelihoods[r]),
                eig,
                trace,
                cv,
            ]);
        }
        t.note("* = selected number of cointegrating equations");
        t.note(format!(
            "Trend: {}   Observations: {}   Lags: {}   Sample: {}-{}",
            self.deterministic, self.t_eff, self.lags, self.sample_first, self.sample_last
        ));
        t
    }
}
