//! Pre- and post-estimation tests.

mod adf;
mod lagselect;
mod lm;
mod normality;
mod stability;

pub use adf::{adf_critical_values, adf_test, AdfCriticalValues, AdfResult, Deterministic};
pub use lagselect::{
    information_criteria, lag_order_selection, lag_table_from_loglik, InformationCriteria, LagRow,
    LagSelectionReport, SelectedLags,
};
pub use lm::{lm_autocorrelation, LmResult};
pub use normality::{normality_from_moments, normality_suite, JointNormality, NormalityReport, NormalityRow};
pub use stability::{vecm_stability, StabilityReport, UNIT_MODULUS_TOL};

/// Significance level used for reject/accept markers.
pub const SIGNIFICANCE: f64 = 0.05;
