use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::report::{sig, TextTable};
use crate::var::stability_moduli;
use crate::vecm::{vecm_to_levels_var, VecmFit};

/// Distance from one below which a companion root counts as a unit root.
pub const UNIT_MODULUS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Companion-matrix eigenvalue moduli, descending.
    pub moduli: Vec<f64>,
    pub unit_count: usize,
    /// `K − r` for a correctly specified VECM.
    pub expected_unit_count: usize,
    /// Largest modulus not counted as a unit root.
    pub largest_other: Option<f64>,
    pub pass: bool,
}

/// Checks that the levels representation has exactly `K − r` unit roots and
/// every other root strictly inside the unit circle.
pub fn vecm_stability(fit: &VecmFit) -> Result<StabilityReport> {
    let moduli = stability_moduli(&vecm_to_levels_var(fit))?;
    let is_unit = |m: f64| (m - 1.0).abs() <= UNIT_MODULUS_TOL;
    let unit_count = moduli.iter().filter(|&&m| is_unit(m)).count();
    let largest_other = moduli.iter().copied().filter(|&m| !is_unit(m)).reduce(f64::max);
    let expected_unit_count = fit.nvars() - fit.rank;
    Ok(StabilityReport {
        pass: unit_count == expected_unit_count && largest_other.is_none_or(|m| m < 1.0),
        moduli,
        unit_count,
        expected_unit_count,
        largest_other,
    })
}

impl StabilityReport {
    pub fn to_table(&self) -> TextTable {
        let mut t = TextTable::new(["Root", "Modulus"]);
        for (i, m) in self.moduli.iter().enumerate() {
            t.row([(i + 1).to_string(), sig(*m)]);
        }
        t.note(format!(
            "{} unit moduli (expected {}); {}",
            self.unit_count,
            self.expected_unit_count,
            if self.pass { "stable" } else { "NOT stable" }
        ));
        t
    }
}
