use serde::{Deserialize, Serialize};

use super::SIGNIFICANCE;
use crate::error::{Error, Result};
use crate::numerics::{chi_square_sf, ols};
use crate::report::{sig, TextTable};
use crate::timeseries::{Frame, QuarterIndex};
use crate::var::lagged_design;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationCriteria {
    pub fpe: f64,
    pub aic: f64,
    pub hqic: f64,
    pub sbic: f64,
}

/// Per-observation criteria for a VAR(`lag`) with a constant, from its log-likelihood.
///
/// With `m = K(K·lag + 1)` parameters: `AIC = (−2LL + 2m)/T`,
/// `HQIC = (−2LL + 2m ln ln T)/T`, `SBIC = (−2LL + m ln T)/T`, and
/// `FPE = ((T + m̄)/(T − m̄))^K |Σ|` with `m̄ = K·lag + 1` and `|Σ|` recovered
/// from the log-likelihood.
pub fn information_criteria(log_likelihood: f64, t_eff: usize, nvars: usize, lag: usize) -> InformationCriteria {
    let t = t_eff as f64;
    let k = nvars as f64;
    let per_eq = (nvars * lag + 1) as f64;
    let m = k * per_eq;
    let ll2 = -2.0 * log_likelihood;
    let ln_det = ll2 / t - k * (1.0 + (2.0 * std::f64::consts::PI).ln());
    InformationCriteria {
        fpe: ((t + per_eq) / (t - per_eq)).powf(k) * ln_det.exp(),
        aic: (ll2 + 2.0 * m) / t,
        hqic: (ll2 + 2.0 * m * t.ln().ln()) / t,
        sbic: (ll2 + m * t.ln()) / t,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagRow {
    pub lag: usize,
    pub log_likelihood: f64,
    /// `2(LL_j − LL_{j−1})`; absent for lag 0.
    pub lr: Option<f64>,
    pub df: Option<usize>,
    pub p_value: Option<f64>,
    #[serde(flatten)]
    pub criteria: InformationCriteria,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedLags {
    pub lr: usize,
    pub fpe: usize,
    pub aic: usize,
    pub hqic: usize,
    pub sbic: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSelectionReport {
    pub rows: Vec<LagRow>,
    pub selected: SelectedLags,
    pub t_eff: usize,
    pub nvars: usize,
    pub sample_first: Option<QuarterIndex>,
    pub sample_last: Option<QuarterIndex>,
}

fn argmin(rows: &[LagRow], key: impl Fn(&LagRow) -> f64) -> usize {
    rows.iter()
        .min_by(|a, b| key(a).total_cmp(&key(b)))
        .map_or(0, |r| r.lag)
}

/// Builds the lag table from log-likelihoods of VAR(0..=max) fitted on a common sample.
pub fn lag_table_from_loglik(log_likelihoods: &[f64], t_eff: usize, nvars: usize) -> Result<LagSelectionReport> {
    if log_likelihoods.is_empty() {
        return Err(Error::insufficient("lag table", 1, 0));
    }
    let df = nvars * nvars;
    let mut rows = Vec::with_capacity(log_likelihoods.len());
    for (lag, &ll) in log_likelihoods.iter().enumerate() {
        let (lr, p_value) = if lag == 0 {
            (None, None)
        } else {
            let lr = 2.0 * (ll - log_likelihoods[lag - 1]);
            (Some(lr), Some(chi_square_sf(lr.max(0.0), df as u32)?))
        };
        rows.push(LagRow {
            lag,
            log_likelihood: ll,
            lr,
            df: (lag > 0).then_some(df),
            p_value,
            criteria: information_criteria(ll, t_eff, nvars, lag),
        });
    }
    // sequential LR: the largest lag whose test still rejects
    let lr = rows
        .iter()
        .rev()
        .find(|r| r.p_value.is_some_and(|p| p < SIGNIFICANCE))
        .map_or(0, |r| r.lag);
    let selected = SelectedLags {
        lr,
        fpe: argmin(&rows, |r| r.criteria.fpe),
        aic: argmin(&rows, |r| r.criteria.aic),
        hqic: argmin(&rows, |r| r.criteria.hqic),
        sbic: argmin(&rows, |r| r.criteria.sbic),
    };
    Ok(LagSelectionReport {
        rows,
        selected,
        t_eff,
        nvars,
        sample_first: None,
        sample_last: None,
    })
}

/// Fits VAR(0..=max_lag) with a constant on the common sample that drops the
/// first `max_lag` observations, and tabulates the selection criteria.
pub fn lag_order_selection(frame: &Frame, max_lag: usize) -> Result<LagSelectionReport> {
    if max_lag == 0 {
        return Err(Error::Domain("max_lag must be at least 1".into()));
    }
    let (t, k) = (frame.len(), frame.width());
    let biggest = k * max_lag + 1;
    if t <= max_lag || t - max_lag <= biggest {
        return Err(Error::insufficient(
            format!("lag selection up to {max_lag} lags"),
            max_lag + biggest + 1,
            t,
        ));
    }
    let levels = frame.to_matrix();
    let t_eff = t - max_lag;
    let y = levels.rows(max_lag, t_eff).into_owned();
    let full = lagged_design(&levels, max_lag, max_lag);
    let lls = (0..=max_lag)
        .map(|j| ols(&y, &full.columns(0, 1 + k * j).into_owned())?.log_likelihood())
        .collect::<Result<Vec<_>>>()?;
    let mut report = lag_table_from_loglik(&lls, t_eff, k)?;
    report.sample_first = Some(frame.quarter(max_lag));
    report.sample_last = Some(frame.end());
    Ok(report)
}

impl LagSelectionReport {
    pub fn to_table(&self) -> TextTable {
        let mut t = TextTable::new(["Lag", "LL", "LR", "D.f.", "P-Value", "FPE", "AIC", "HQIC", "SBIC"]);
        let star = |hit: bool, s: String| if hit { format!("{s}*") } else { s };
        let sel = self.selected;
        for r in &self.rows {
            let c = r.criteria;
            t.row([
                r.lag.to_string(),
                sig(r.log_likelihood),
                r.lr.map(|v| star(sel.lr == r.lag, sig(v))).unwrap_or_default(),
                r.df.map(|d| d.to_string()).unwrap_or_default(),
                r.p_value.map(sig).unwrap_or_default(),
                star(sel.fpe == r.lag, sig(c.fpe)),
                star(sel.aic == r.lag, sig(c.aic)),
                star(sel.hqic == r.lag, sig(c.hqic)),
                star(sel.sbic == r.lag, sig(c.sbic)),
            ]);
        }
        t.note("* = suggested number of lags");
        let sample = match (self.sample_first, self.sample_last) {
            (Some(a), Some(b)) => format!("   Sample: {a}-{b}"),
            _ => String::new(),
        };
        t.note(format!("Observations: {}{sample}   (constant only deterministic term)", self.t_eff));
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use crate::timeseries::parse_quarter;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    const TABLE_LL: [f64; 5] = [-1223.9, -919.13, -850.65, -805.93, -699.43];

    #[test]
    fn reproduces_published_criteria() {
        let rep = lag_table_from_loglik(&TABLE_LL, 65, 6).unwrap();
        let r4 = &rep.rows[4];
        assert!((r4.criteria.aic - 26.14).abs() <= 0.01);
        assert!((r4.criteria.hqic - 28.12).abs() <= 0.01);
        assert!((rep.rows[1].criteria.sbic - 30.98).abs() <= 0.01);
        assert!((r4.criteria.fpe / 11_604.2 - 1.0).abs() <= 0.005);
        assert!((r4.lr.unwrap() - 213.00).abs() <= 0.01);
        assert_eq!(r4.df, Some(36));
        assert!((rep.rows[1].lr.unwrap() - 609.54).abs() < 1e-9);
        assert_eq!(
            rep.selected,
            SelectedLags {
                lr: 4,
                fpe: 4,
                aic: 4,
                hqic: 4,
                sbic: 1
            }
        );
        assert!((rep.rows[0].criteria.aic - 37.84).abs() <= 0.01);
    }

    #[test]
    fn penalty_ordering() {
        // SBIC ≥ HQIC ≥ AIC once T ≥ 16
        for t in [16, 40, 200] {
            for lag in 0..4 {
                let c = information_criteria(-300.0, t, 3, lag);
                assert!(c.sbic >= c.hqic && c.hqic >= c.aic);
            }
        }
    }

    fn white_noise(t: usize, k: usize, seed: u64) -> Frame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Matrix::from_fn(t, k, |_, _| StandardNormal.sample(&mut rng));
        let names: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
        Frame::from_matrix(parse_quarter("1900Q1").unwrap(), &names, &m).unwrap()
    }

    #[test]
    fn common_sample_and_consistency() {
        let f = white_noise(69, 2, 3);
        let rep = lag_order_selection(&f, 4).unwrap();
        assert_eq!(rep.t_eff, 65);
        assert_eq!(rep.rows.len(), 5);
        assert_eq!(rep.sample_first.unwrap().to_string(), "1901Q1");
        // LL is nondecreasing in nested models on a common sample
        assert!(rep.rows.windows(2).all(|w| w[1].log_likelihood >= w[0].log_likelihood - 1e-9));
        assert!(rep.rows[1..].iter().all(|r| r.df == Some(4)));
        let text = rep.to_table().render();
        assert!(text.contains("SBIC") && text.contains('*'));
    }

    #[test]
    fn sbic_picks_zero_on_white_noise() {
        let hits = (0..100)
            .filter(|&seed| lag_order_selection(&white_noise(400, 2, 1000 + seed), 4).unwrap().selected.sbic == 0)
            .count();
        assert!(hits >= 90, "{hits}");
    }

    #[test]
    fn rejects_small_samples() {
        assert!(lag_order_selection(&white_noise(10, 3, 1), 3).is_err());
        assert!(lag_order_selection(&white_noise(50, 2, 1), 0).is_err());
    }
}
