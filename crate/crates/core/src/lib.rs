//! Cointegration-aware multivariate time-series econometrics.
//!
//! The crate covers the workflow of a small macro-panel study: quarterly data
//! ingestion, lag-order selection, Johansen rank testing, VECM and VAR
//! estimation, residual diagnostics, orthogonalized impulse responses,
//! dynamic forecasting, and a three-stage exogenous-shock pipeline.

pub mod diagnostics;
pub mod error;
pub mod irf;
pub mod numerics;
pub mod report;
pub mod shock;
pub mod timeseries;
pub mod var;
pub mod vecm;

pub use error::{Error, Result};
pub use numerics::Matrix;
pub use timeseries::{Frame, QuarterIndex, Series};
