use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{chi_square_sf, cholesky_lower, Matrix};
use crate::report::{sig, TextTable};

const MIN_OBS: usize = 8;

/// Per-equation skewness, kurtosis and Jarque–Bera statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityRow {
    pub equation: String,
    pub skewness: f64,
    pub kurtosis: f64,
    pub skewness_chi2: f64,
    pub skewness_p: f64,
    pub kurtosis_chi2: f64,
    pub kurtosis_p: f64,
    pub jarque_bera: f64,
    pub jarque_bera_p: f64,
}

/// System-wide sums: skewness and kurtosis with `K` d.f., Jarque–Bera with `2K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointNormality {
    pub skewness_chi2: f64,
    pub skewness_df: usize,
    pub skewness_p: f64,
    pub kurtosis_chi2: f64,
    pub kurtosis_df: usize,
    pub kurtosis_p: f64,
    pub jarque_bera: f64,
    pub jarque_bera_df: usize,
    pub jarque_bera_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n_eff: usize,
    pub rows: Vec<NormalityRow>,
    pub joint: JointNormality,
}

/// Builds the report from per-equation `(skewness, kurtosis)` pairs.
///
/// `χ²_S = n S²/6` (1 d.f.), `χ²_K = n (κ − 3)²/24` (1 d.f.), and their sum
/// is the Jarque–Bera statistic (2 d.f.).
pub fn normality_from_moments<S: AsRef<str>>(names: &[S], moments: &[(f64, f64)], n_eff: usize) -> Result<NormalityReport> {
    if names.len() != moments.len() {
        return Err(Error::Dimension(format!("{} names for {} equations", names.len(), moments.len())));
    }
    if moments.is_empty() {
        return Err(Error::Dimension("no equations".into()));
    }
    if n_eff < MIN_OBS {
        return Err(Error::insufficient("normality tests", MIN_OBS, n_eff));
    }
    let n = n_eff as f64;
    let mut rows = Vec::with_capacity(moments.len());
    for (name, &(s, kurt)) in names.iter().zip(moments) {
        if !s.is_finite() || !kurt.is_finite() {
            return Err(Error::Domain(format!("non-finite moment for {}", name.as_ref())));
        }
        let sk = n * s * s / 6.0;
        let ku = n * (kurt - 3.0).powi(2) / 24.0;
        rows.push(NormalityRow {
            equation: name.as_ref().to_string(),
            skewness: s,
            kurtosis: kurt,
            skewness_chi2: sk,
            skewness_p: chi_square_sf(sk, 1)?,
            kurtosis_chi2: ku,
            kurtosis_p: chi_square_sf(ku, 1)?,
            jarque_bera: sk + ku,
            jarque_bera_p: chi_square_sf(sk + ku, 2)?,
        });
    }
    let k = rows.len();
    let sk: f64 = rows.iter().map(|r| r.skewness_chi2).sum();
    let ku: f64 = rows.iter().map(|r| r.kurtosis_chi2).sum();
    let joint = JointNormality {
        skewness_chi2: sk,
        skewness_df: k,
        skewness_p: chi_square_sf(sk, k as u32)?,
        kurtosis_chi2: ku,
        kurtosis_df: k,
        kurtosis_p: chi_square_sf(ku, k as u32)?,
        jarque_bera: sk + ku,
        jarque_bera_df: 2 * k,
        jarque_bera_p: chi_square_sf(sk + ku, 2 * k as u32)?,
    };
    Ok(NormalityReport { n_eff, rows, joint })
}

/// Tests residual normality after orthogonalizing with the Cholesky factor of
/// the residual covariance, so the result depends on the column order.
pub fn normality_suite<S: AsRef<str>>(residuals: &Matrix, names: &[S], n_eff: usize) -> Result<NormalityReport> {
    let (t, k) = residuals.shape();
    if names.len() != k {
        return Err(Error::Dimension(format!("{} names for {k} residual columns", names.len())));
    }
    if t < MIN_OBS {
        return Err(Error::insufficient("normality tests", MIN_OBS, t));
    }
    let mut centered = residuals.clone();
    for (j, name) in names.iter().enumerate() {
        let mean = centered.column(j).mean();
        centered.column_mut(j).add_scalar_mut(-mean);
        let var = centered.column(j).norm_squared() / t as f64;
        let scale = residuals.column(j).amax().max(f64::MIN_POSITIVE);
        if var <= (1e-12 * scale).powi(2) {
            return Err(Error::Degenerate(format!("residual column {} has zero variance", name.as_ref())));
        }
    }
    let cov = centered.transpose() * &centered / t as f64;
    let cov = (&cov + cov.transpose()) * 0.5;
    let chol = cholesky_lower(&cov)
        .map_err(|e| Error::Degenerate(format!("residual covariance is singular ({e})")))?;
    // row-wise w_t = P⁻¹ u_t
    let w = chol.solve_lower(&centered.transpose()).transpose();
    let moments: Vec<(f64, f64)> = (0..k)
        .map(|j| {
            let col = w.column(j);
            let m2 = col.iter().map(|v| v * v).sum::<f64>() / t as f64;
            let m3 = col.iter().map(|v| v.powi(3)).sum::<f64>() / t as f64;
            let m4 = col.iter().map(|v| v.powi(4)).sum::<f64>() / t as f64;
            (m3 / m2.powf(1.5), m4 / (m2 * m2))
        })
        .collect();
    normality_from_moments(names, &moments, n_eff)
}

impl NormalityReport {
    pub fn to_table(&self) -> TextTable {
        let mut t = TextTable::new([
            "Equation", "Skewness", "Chi2", "Prob", "Kurtosis", "Chi2", "Prob", "Jarque-Bera", "Prob",
        ]);
        for r in &self.rows {
            t.row([
                r.equation.clone(),
                sig(r.skewness),
                sig(r.skewness_chi2),
                sig(r.skewness_p),
                sig(r.kurtosis),
                sig(r.kurtosis_chi2),
                sig(r.kurtosis_p),
                sig(r.jarque_bera),
                sig(r.jarque_bera_p),
            ]);
        }
        let j = &self.joint;
        t.row([
            "ALL".to_string(),
            String::new(),
            sig(j.skewness_chi2),
            sig(j.skewness_p),
            String::new(),
            sig(j.kurtosis_chi2),
            sig(j.kurtosis_p),
            sig(j.jarque_bera),
            sig(j.jarque_bera_p),
        ]);
        t.note(format!(
            "Single equations: 1 d.f. (2 for Jarque-Bera). ALL: {} d.f. ({} for Jarque-Bera). n = {}",
            j.skewness_df, j.jarque_bera_df, self.n_eff
        ));
        t
    }
}
