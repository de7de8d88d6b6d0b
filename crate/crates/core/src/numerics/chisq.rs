use statrs::function::gamma::{checked_gamma_lr, checked_gamma_ur};

use crate::error::{Error, Result};

fn check(x: f64, df: u32) -> Result<()> {
    if df == 0 {
        return Err(Error::Domain("chi-square degrees of freedom must be ≥ 1".into()));
    }
    if x.is_nan() || x < 0.0 || x.is_infinite() {
        return Err(Error::Domain(format!("chi-square argument must be finite and ≥ 0, got {x}")));
    }
    Ok(())
}

/// Upper-tail probability `P(χ²_df > x)` via the regularized upper incomplete gamma function.
pub fn chi_square_sf(x: f64, df: u32) -> Result<f64> {
    check(x, df)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    checked_gamma_ur(f64::from(df) / 2.0, x / 2.0).map_err(|e| Error::Domain(e.to_string()))
}

pub fn chi_square_cdf(x: f64, df: u32) -> Result<f64> {
    check(x, df)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    checked_gamma_lr(f64::from(df) / 2.0, x / 2.0).map_err(|e| Error::Domain(e.to_string()))
}
