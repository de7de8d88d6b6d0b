use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ols, Matrix};
use crate::report::{sig, TextTable};
use crate::timeseries::Series;

/// Deterministic terms in the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministic {
    None,
    Constant,
    ConstantTrend,
}

impl Deterministic {
    fn columns(self) -> usize {
        match self {
            Deterministic::None => 0,
            Deterministic::Constant => 1,
            Deterministic::ConstantTrend => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdfCriticalValues {
    pub one: f64,
    pub five: f64,
    pub ten: f64,
}

// MacKinnon (2010) response surfaces, one series: c(N) = b0 + b1/N + b2/N² + b3/N³,
// rows are the 1%, 5% and 10% levels.
const TAU_NC: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const TAU_C: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const TAU_CT: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// Finite-sample Dickey–Fuller critical values for `nobs` regression rows.
pub fn adf_critical_values(spec: Deterministic, nobs: usize) -> AdfCriticalValues {
    let table = match spec {
        Deterministic::None => &TAU_NC,
        Deterministic::Constant => &TAU_C,
        Deterministic::ConstantTrend => &TAU_CT,
    };
    let inv = 1.0 / nobs as f64;
    let eval = |b: &[f64; 4]| b[0] + inv * (b[1] + inv * (b[2] + inv * b[3]));
    AdfCriticalValues {
        one: eval(&table[0]),
        five: eval(&table[1]),
        ten: eval(&table[2]),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub series: String,
    pub statistic: f64,
    pub lags: usize,
    pub deterministic: Deterministic,
    pub nobs: usize,
    pub critical_values: AdfCriticalValues,
    /// Unit root rejected at 5%.
    pub reject: bool,
}

/// Augmented Dickey–Fuller t-test on the coefficient of `y_{t−1}` in
/// `Δy_t = [det] + ρ y_{t−1} + Σ_j φ_j Δy_{t−j} + e_t`.
pub fn adf_test(series: &Series, lags: usize, spec: Deterministic) -> Result<AdfResult> {
    let y = series.values();
    let n = y.len();
    if n <= lags + 8 {
        return Err(Error::insufficient(format!("ADF test with {lags} lags"), lags + 9, n));
    }
    if y.iter().all(|v| *v == y[0]) {
        return Err(Error::Degenerate(format!("series {} is constant", series.name)));
    }
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    // rows t = lags+1 .. n-1 in levels; dy index t-1
    let first = lags + 1;
    let rows = n - first;
    let d = spec.columns();
    let x = Matrix::from_fn(rows, d + 1 + lags, |i, c| {
        let t = first + i;
        match c {
            0 if d >= 1 => 1.0,
            1 if d == 2 => t as f64,
            c if c == d => y[t - 1],
            c => dy[t - 1 - (c - d)],
        }
    });
    let target = Matrix::from_fn(rows, 1, |i, _| dy[first + i - 1]);
    let fit = ols(&target, &x)?;
    let se = fit.std_errors()[(d, 0)];
    if se.is_nan() || se <= 0.0 {
        return Err(Error::Degenerate("zero standard error in ADF regression".into()));
    }
    let statistic = fit.coefficients[(d, 0)] / se;
    let critical_values = adf_critical_values(spec, rows);
    Ok(AdfResult {
        series: series.name.clone(),
        statistic,
        lags,
        deterministic: spec,
        nobs: rows,
        critical_values,
        reject: statistic < critical_values.five,
    })
}

impl AdfResult {
    pub fn table(results: &[AdfResult]) -> TextTable {
        let mut t = TextTable::new(["Series", "Test stat", "1% CV", "5% CV", "10% CV", "Lags", "Obs", "Unit root"]);
        for r in results {
            let c = r.critical_values;
            t.row([
                r.series.clone(),
                sig(r.statistic),
                sig(c.one),
                sig(c.five),
                sig(c.ten),
                r.lags.to_string(),
                r.nobs.to_string(),
                if r.reject { "rejected" } else { "not rejected" }.to_string(),
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::parse_quarter;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn series(values: Vec<f64>) -> Series {
        Series::new("y", parse_quarter("1950Q1").unwrap(), values).unwrap()
    }

    fn ar1(phi: f64, n: usize, seed: u64) -> Series {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = vec![0.0; n];
        for t in 1..n {
            let e: f64 = StandardNormal.sample(&mut rng);
            y[t] = phi * y[t - 1] + e;
        }
        series(y)
    }

    #[test]
    fn critical_values_near_asymptotic() {
        let c = adf_critical_values(Deterministic::Constant, 100);
        assert!((c.five + 2.891).abs() < 0.002);
        let c = adf_critical_values(Deterministic::ConstantTrend, 100_000);
        assert!((c.one + 3.95877).abs() < 1e-3);
        let c = adf_critical_values(Deterministic::None, 250);
        assert!(c.one < c.five && c.five < c.ten);
    }

    #[test]
    fn stationary_rejects_random_walk_does_not() {
        let r = adf_test(&ar1(0.3, 400, 1), 1, Deterministic::Constant).unwrap();
        assert!(r.reject && r.statistic < -8.0, "{r:?}");
        assert_eq!(r.nobs, 398);
        let hits = (0..40)
            .filter(|&s| adf_test(&ar1(1.0, 200, 100 + s), 2, Deterministic::Constant).unwrap().reject)
            .count();
        assert!(hits <= 6, "{hits}");
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            adf_test(&series(vec![1.0; 30]), 1, Deterministic::Constant),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            adf_test(&series((0..10).map(f64::from).collect()), 2, Deterministic::Constant),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn trend_regression_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let y: Vec<f64> = (0..120)
            .map(|t| { let e: f64 = StandardNormal.sample(&mut rng); 0.5 * t as f64 + e })
            .collect();
        let r = adf_test(&series(y), 0, Deterministic::ConstantTrend).unwrap();
        assert!(r.reject);
        assert!(AdfResult::table(&[r]).render().contains("rejected"));
    }
}
