//! Orthogonalized impulse responses from the moving-average representation.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cholesky_lower, serde_rows, Matrix};
use crate::var::VarFit;

pub const DEFAULT_HORIZON: usize = 20;

/// `Φ_0 = I`, `Φ_h = Σ_{i=1}^{min(h,p)} A_i Φ_{h−i}` for `h = 0..=horizon`.
pub fn ma_coefficients(fit: &VarFit, horizon: usize) -> Vec<Matrix> {
    let k = fit.nvars();
    let mut phi = Vec::with_capacity(horizon + 1);
    phi.push(Matrix::identity(k, k));
    for h in 1..=horizon {
        let mut next = Matrix::zeros(k, k);
        for (i, a) in fit.coefficients.iter().enumerate().take(h) {
            next += a * &phi[h - 1 - i];
        }
        phi.push(next);
    }
    phi
}

/// All orthogonalized responses `Θ_h = Φ_h P` with `P` the lower Cholesky
/// factor of the residual covariance; the variable order fixes the
/// identification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IrfSet {
    pub ordering: Vec<String>,
    pub horizon: usize,
    /// `Θ_0..Θ_H`; entry `[response, impulse]`.
    #[serde(with = "serde_rows::vec")]
    pub matrices: Vec<Matrix>,
}

/// Response of one variable to a one-standard-deviation orthogonal shock in another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrfResult {
    pub impulse: String,
    pub response: String,
    pub horizon: usize,
    pub ordering: Vec<String>,
    /// `ψ_0..ψ_H`.
    pub responses: Vec<f64>,
}

pub fn orthogonalized_irfs(fit: &VarFit, horizon: usize) -> Result<IrfSet> {
    if horizon == 0 {
        return Err(Error::Domain("impulse-response horizon must be at least 1".into()));
    }
    let p = cholesky_lower(&fit.sigma)?.into_inner();
    let matrices = ma_coefficients(fit, horizon).iter().map(|phi| phi * &p).collect();
    Ok(IrfSet {
        ordering: fit.names.clone(),
        horizon,
        matrices,
    })
}

pub fn orthogonalized_irf(fit: &VarFit, horizon: usize, impulse: &str, response: &str) -> Result<IrfResult> {
    orthogonalized_irfs(fit, horizon)?.pair(impulse, response)
}

impl IrfSet {
    fn index(&self, name: &str) -> Result<usize> {
        self.ordering
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn pair(&self, impulse: &str, response: &str) -> Result<IrfResult> {
        let (j, i) = (self.index(impulse)?, self.index(response)?);
        Ok(IrfResult {
            impulse: impulse.to_string(),
            response: response.to_string(),
            horizon: self.horizon,
            ordering: self.ordering.clone(),
            responses: self.matrices.iter().map(|m| m[(i, j)]).collect(),
        })
    }

    /// Every impulse/response pair, impulse-major.
    pub fn all_pairs(&self) -> Vec<IrfResult> {
        let names = &self.ordering;
        names
            .iter()
            .flat_map(|imp| names.iter().map(move |resp| (imp, resp)))
            .map(|(imp, resp)| self.pair(imp, resp).expect("names come from the ordering"))
            .collect()
    }
}

impl IrfResult {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Domain(e.to_string()))
    }

    /// Two-column `step,response` CSV.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Domain(format!("writing impulse responses: {e}"));
        w.write_record(["step", "response"]).map_err(io)?;
        for (h, v) in self.responses.iter().enumerate() {
            w.write_record([h.to_string(), v.to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Domain(e.to_string()))
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(file)
    }
}
