//! Regional-economics helpers: quarterly output proxies and location quotients.

use std::collections::BTreeMap;

use super::frame::Series;
use crate::error::{Error, Result};

/// Quarterly regional output proxied from national quarterly output and the
/// region's annual share of national output.
///
/// Each quarter uses the constant share of its own calendar year:
/// `out[q] = us_quarterly[q] · region_annual[y] / nation_annual[y]`.
pub fn proxy_quarterly_output(
    us_quarterly: &Series,
    region_annual: &BTreeMap<i32, f64>,
    nation_annual: &BTreeMap<i32, f64>,
    name: &str,
) -> Result<Series> {
    let mut out = Vec::with_capacity(us_quarterly.len());
    for (i, &v) in us_quarterly.values().iter().enumerate() {
        let year = us_quarterly.start.offset(i as i64).year();
        let share = annual_share(year, region_annual, nation_annual)?;
        out.push(v * share);
    }
    Ok(Series::new(name, us_quarterly.start, out)?.with_units(us_quarterly.units.clone()))
}

fn annual_share(year: i32, region: &BTreeMap<i32, f64>, nation: &BTreeMap<i32, f64>) -> Result<f64> {
    let lookup = |table: &BTreeMap<i32, f64>, which: &str| {
        let v = *table
            .get(&year)
            .ok_or_else(|| Error::Domain(format!("{which} annual value missing for {year}")))?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("{which} annual value for {year} must be positive, got {v}")))
        }
    };
    Ok(lookup(region, "regional")? / lookup(nation, "national")?)
}

/// `(industry_region / employment_region) / (industry_nation / employment_nation)`.
pub fn location_quotient(
    industry_region: f64,
    employment_region: f64,
    industry_nation: f64,
    employment_nation: f64,
) -> Result<f64> {
    let inputs = [
        ("industry_region", industry_region),
        ("employment_region", employment_region),
        ("industry_nation", industry_nation),
        ("employment_nation", employment_nation),
    ];
    for (name, v) in inputs {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok((industry_region / employment_region) / (industry_nation / employment_nation))
}
