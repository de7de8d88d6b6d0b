//! Three-stage exogenous-shock analysis.
//!
//! Stage 1 forecasts the system with a VECM and scales the target's forecast
//! path. Stage 2 differences everything, treats the spliced (actual plus
//! shocked forecast) target as exogenous and forecasts the other variables
//! conditionally. Stage 3 refits a VAR on the spliced differenced data with
//! the target endogenous and reports the responses to a target impulse.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::lag_order_selection;
use crate::error::{Error, Result};
use crate::irf::{orthogonalized_irfs, IrfResult, DEFAULT_HORIZON};
use crate::timeseries::{difference_series, first_difference, Frame, QuarterIndex, Series};
use crate::var::{fit_var, forecast_var, ExogenousBlock, VarFit};
use crate::vecm::{fit_vecm, forecast_vecm};

/// Scales every value at or after `start` by `factor`.
pub fn apply_multiplicative_shock(path: &Series, factor: f64, start: QuarterIndex) -> Result<Series> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::Domain(format!("shock factor must be positive, got {factor}")));
    }
    let from = path.position(start).ok_or_else(|| {
        Error::OutOfRange(start.to_string(), path.start.to_string(), path.end().to_string())
    })?;
    let values = path
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if i >= from { v * factor } else { v })
        .collect();
    Ok(Series::new(path.name.clone(), path.start, values)?.with_units(path.units.clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockScenario {
    pub target: String,
    pub factor: f64,
    pub start: QuarterIndex,
    pub horizon: usize,
    /// VECM lag order for stage 1.
    pub vecm_lags: usize,
    pub vecm_rank: usize,
    /// `None` selects by AIC on the differenced in-sample data.
    #[serde(default)]
    pub stage2_lags: Option<usize>,
    #[serde(default)]
    pub stage3_lags: Option<usize>,
    /// Lags of the exogenous target in stage 2 beyond the contemporaneous value.
    #[serde(default)]
    pub exog_lags: usize,
    #[serde(default = "default_aic_max_lag")]
    pub aic_max_lag: usize,
    #[serde(default = "default_irf_horizon")]
    pub irf_horizon: usize,
}

fn default_aic_max_lag() -> usize {
    4
}

fn default_irf_horizon() -> usize {
    DEFAULT_HORIZON
}

impl ShockScenario {
    pub fn new(target: impl Into<String>, factor: f64, start: QuarterIndex, horizon: usize, vecm_lags: usize, vecm_rank: usize) -> Self {
        Self {
            target: target.into(),
            factor,
            start,
            horizon,
            vecm_lags,
            vecm_rank,
            stage2_lags: None,
            stage3_lags: None,
            exog_lags: 0,
            aic_max_lag: default_aic_max_lag(),
            irf_horizon: default_irf_horizon(),
        }
    }
}

/// Scale on which a result is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Levels,
    Differenced,
}

/// One provenance record: which rows fed which step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub stage: u8,
    pub step: String,
    pub first: QuarterIndex,
    pub last: QuarterIndex,
    pub rows: usize,
    pub scale: Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChosenLags {
    pub stage2: usize,
    pub stage3: usize,
    /// Set when either order came from AIC.
    pub aic_selected: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineResult {
    pub scenario: ShockScenario,
    pub shocked: bool,
    /// Stage-1 VECM forecast in levels.
    pub stage1_forecast: Frame,
    /// Target forecast path after the shock, in levels.
    pub shocked_path: Series,
    /// Stage-2 conditional forecasts, differenced, all variables in input order
    /// (the target column is the differenced shocked path).
    pub stage2_forecast: Frame,
    pub stage3_model: VarFit,
    /// Responses of every variable to the target impulse.
    pub irfs: Vec<IrfResult>,
    pub irf_scale: Scale,
    pub lags: ChosenLags,
    pub audit: Vec<AuditEntry>,
}

fn entry(stage: u8, step: &str, first: QuarterIndex, last: QuarterIndex, rows: usize, scale: Scale) -> AuditEntry {
    AuditEntry {
        stage,
        step: step.to_string(),
        first,
        last,
        rows,
        scale,
    }
}

fn frame_entry(stage: u8, step: &str, frame: &Frame, scale: Scale) -> AuditEntry {
    entry(stage, step, frame.start(), frame.end(), frame.len(), scale)
}

fn validate(frame: &Frame, s: &ShockScenario) -> Result<()> {
    frame.column(&s.target)?;
    if s.horizon == 0 {
        return Err(Error::Domain("forecast horizon must be at least 1".into()));
    }
    let first = frame.end().succ();
    let last = frame.end().offset(s.horizon as i64);
    if s.start < first || s.start > last {
        return Err(Error::OutOfRange(s.start.to_string(), first.to_string(), last.to_string()));
    }
    if !(s.factor > 0.0 && s.factor.is_finite()) {
        return Err(Error::Domain(format!("shock factor must be positive, got {}", s.factor)));
    }
    if frame.width() < 2 {
        return Err(Error::Dimension("the pipeline needs the target plus at least one other variable".into()));
    }
    Ok(())
}

/// Runs all three stages.
pub fn run_three_stage(frame: &Frame, scenario: &ShockScenario) -> Result<PipelineResult> {
    run(frame, scenario, true)
}

/// The same pipeline with the shock step skipped; the baseline for comparisons.
pub fn run_unshocked(frame: &Frame, scenario: &ShockScenario) -> Result<PipelineResult> {
    run(frame, scenario, false)
}

fn run(frame: &Frame, s: &ShockScenario, shock: bool) -> Result<PipelineResult> {
    validate(frame, s)?;
    let mut audit = vec![frame_entry(0, "input", frame, Scale::Levels)];

    // stage 1
    let vecm = fit_vecm(frame, s.vecm_lags, s.vecm_rank).map_err(|e| e.in_stage(1))?;
    audit.push(entry(1, "vecm_estimation", vecm.sample.first, vecm.sample.last, vecm.sample.observations, Scale::Levels));
    let stage1_forecast = forecast_vecm(&vecm, s.horizon).map_err(|e| e.in_stage(1))?;
    audit.push(frame_entry(1, "vecm_forecast", &stage1_forecast, Scale::Levels));
    let baseline = stage1_forecast.column(&s.target)?.clone();
    let shocked_path = if shock {
        apply_multiplicative_shock(&baseline, s.factor, s.start).map_err(|e| e.in_stage(1))?
    } else {
        baseline
    };
    audit.push(entry(1, "shocked_path", shocked_path.start, shocked_path.end(), shocked_path.len(), Scale::Levels));

    // stage 2
    let in_sample = first_difference(frame).map_err(|e| e.in_stage(2))?;
    audit.push(frame_entry(2, "differenced_in_sample", &in_sample, Scale::Differenced));
    let actual = frame.column(&s.target)?;
    let mut spliced = actual.values().to_vec();
    spliced.extend_from_slice(shocked_path.values());
    let spliced = Series::new(s.target.clone(), actual.start, spliced).map_err(|e| e.in_stage(2))?;
    let exog_path = Frame::new(vec![difference_series(&spliced).map_err(|e| e.in_stage(2))?]).map_err(|e| e.in_stage(2))?;
    audit.push(frame_entry(2, "differenced_spliced_target", &exog_path, Scale::Differenced));

    let aic = if s.stage2_lags.is_none() || s.stage3_lags.is_none() {
        let report = lag_order_selection(&in_sample, s.aic_max_lag).map_err(|e| e.in_stage(2))?;
        Some(report.selected.aic.max(1))
    } else {
        None
    };
    let lags = ChosenLags {
        stage2: s.stage2_lags.or(aic).expect("AIC ran when unset"),
        stage3: s.stage3_lags.or(aic).expect("AIC ran when unset"),
        aic_selected: aic,
    };

    let others: Vec<String> = frame.names().into_iter().filter(|n| *n != s.target).collect();
    let endog = in_sample.select(&others)?;
    let block = ExogenousBlock::contemporaneous(exog_path.clone()).with_lags(s.exog_lags);
    let stage2 = fit_var(&endog, lags.stage2, Some(&block)).map_err(|e| e.in_stage(2))?;
    audit.push(entry(2, "var_estimation", stage2.sample.first, stage2.sample.last, stage2.sample.observations, Scale::Differenced));
    let conditional = forecast_var(&stage2, s.horizon, Some(&exog_path)).map_err(|e| e.in_stage(2))?;
    let mut columns = Vec::with_capacity(frame.width());
    for name in frame.names() {
        columns.push(if name == s.target {
            let from = exog_path.row_of(conditional.start()).ok_or_else(|| Error::Coverage(conditional.start().to_string()).in_stage(2))?;
            let values = exog_path.columns()[0].values()[from..from + s.horizon].to_vec();
            Series::new(name, conditional.start(), values)?
        } else {
            conditional.column(&name)?.clone()
        });
    }
    let stage2_forecast = Frame::new(columns).map_err(|e| e.in_stage(2))?;
    audit.push(frame_entry(2, "conditional_forecast", &stage2_forecast, Scale::Differenced));

    // stage 3
    let combined = in_sample.append(&stage2_forecast).map_err(|e| e.in_stage(3))?;
    audit.push(frame_entry(3, "spliced_sample", &combined, Scale::Differenced));
    let stage3_model = fit_var(&combined, lags.stage3, None).map_err(|e| e.in_stage(3))?;
    audit.push(entry(3, "var_estimation", stage3_model.sample.first, stage3_model.sample.last, stage3_model.sample.observations, Scale::Differenced));
    let set = orthogonalized_irfs(&stage3_model, s.irf_horizon).map_err(|e| e.in_stage(3))?;
    let irfs = frame
        .names()
        .iter()
        .map(|resp| set.pair(&s.target, resp))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage(3))?;

    Ok(PipelineResult {
        scenario: s.clone(),
        shocked: shock,
        stage1_forecast,
        shocked_path,
        stage2_forecast,
        stage3_model,
        irfs,
        irf_scale: Scale::Differenced,
        lags,
        audit,
    })
}

#[derive(Serialize)]
struct AuditRecord<'a> {
    scenario: &'a ShockScenario,
    shocked: bool,
    lags: ChosenLags,
    irf_scale: Scale,
    stage2_forecast_scale: Scale,
    samples: &'a [AuditEntry],
}

impl PipelineResult {
    pub fn audit_json(&self) -> serde_json::Value {
        serde_json::to_value(AuditRecord {
            scenario: &self.scenario,
            shocked: self.shocked,
            lags: self.lags,
            irf_scale: self.irf_scale,
            stage2_forecast_scale: Scale::Differenced,
            samples: &self.audit,
        })
        .expect("audit record serializes")
    }

    /// Writes the result files into `dir`, which must exist.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        let mut written = Vec::new();
        let p = dir.join("stage1_forecast.csv");
        self.stage1_forecast.write_csv_file(&p)?;
        written.push(p);
        let p = dir.join("shocked_path.csv");
        Frame::new(vec![self.shocked_path.clone()])?.write_csv_file(&p)?;
        written.push(p);
        let p = dir.join("stage2_forecast.csv");
        self.stage2_forecast.write_csv_file(&p)?;
        written.push(p);
        let p = dir.join("stage3_model.json");
        std::fs::write(&p, self.stage3_model.to_json()?).map_err(io(&p))?;
        written.push(p);
        for irf in &self.irfs {
            let p = dir.join(format!("irf_{}_{}.csv", irf.impulse, irf.response));
            irf.write_csv_file(&p)?;
            written.push(p);
        }
        let p = dir.join("audit.json");
        let text = serde_json::to_string_pretty(&self.audit_json()).map_err(|e| Error::Domain(e.to_string()))?;
        std::fs::write(&p, text).map_err(io(&p))?;
        written.push(p);
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;
    use crate::timeseries::parse_quarter;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn q(s: &str) -> QuarterIndex {
        parse_quarter(s).unwrap()
    }

    #[test]
    fn shock_examples() {
        let path = Series::new("x", q("2018Q1"), vec![1.0, 1.0, 1.0]).unwrap();
        let s = apply_multiplicative_shock(&path, 1.15, q("2018Q2")).unwrap();
        assert_eq!(s.values(), &[1.0, 1.15, 1.15]);
        assert_eq!(apply_multiplicative_shock(&path, 1.0, q("2018Q1")).unwrap(), path);
        let half = Series::new("x", q("2018Q1"), vec![0.5, 0.5]).unwrap();
        assert_eq!(apply_multiplicative_shock(&half, 2.0, q("2018Q1")).unwrap().values(), &[1.0, 1.0]);
        assert!(matches!(
            apply_multiplicative_shock(&path, 1.1, q("2019Q1")),
            Err(Error::OutOfRange(..))
        ));
        assert!(apply_multiplicative_shock(&path, 0.0, q("2018Q1")).is_err());
    }

    /// A drifting random walk `a`, `b` cointegrated with it, and a stationary AR(1) `c`.
    fn panel(t: usize, seed: u64) -> Frame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = Normal::new(0.0, 1.0).unwrap();
        let mut m = Matrix::zeros(t, 3);
        let (mut a, mut c) = (100.0, 50.0);
        for i in 0..t {
            a += 0.3 + n.sample(&mut rng);
            c = 0.8 * c + 0.2 * 50.0 + 0.5 * n.sample(&mut rng);
            m[(i, 0)] = a;
            m[(i, 1)] = 2.0 + a + 0.5 * n.sample(&mut rng);
            m[(i, 2)] = c;
        }
        Frame::from_matrix(q("2001Q1"), &["a", "b", "c"], &m).unwrap()
    }

    fn scenario(frame: &Frame, factor: f64) -> ShockScenario {
        ShockScenario::new("a", factor, frame.end().succ(), 12, 2, 1)
    }

    #[test]
    fn stages_are_accounted_for() {
        let f = panel(120, 1);
        let mut s = scenario(&f, 1.15);
        s.stage2_lags = Some(2);
        s.stage3_lags = Some(1);
        let r = run_three_stage(&f, &s).unwrap();
        assert_eq!(r.stage1_forecast.start(), f.end().succ());
        assert_eq!(r.stage1_forecast.len(), 12);
        let s2 = r.audit.iter().find(|e| e.stage == 2 && e.step == "var_estimation").unwrap();
        assert_eq!(s2.rows, (120 - 1) - 2);
        let s3 = r.audit.iter().find(|e| e.stage == 3 && e.step == "spliced_sample").unwrap();
        assert_eq!(s3.rows, 119 + 12);
        assert_eq!(r.irfs.len(), 3);
        assert!(r.irfs.iter().all(|i| i.impulse == "a" && i.responses.len() == 21));
        assert_eq!(r.irf_scale, Scale::Differenced);
        assert_eq!(r.lags.aic_selected, None);
        let again = run_three_stage(&f, &s).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn unit_factor_matches_unshocked() {
        let f = panel(100, 2);
        let s = scenario(&f, 1.0);
        let a = run_three_stage(&f, &s).unwrap();
        let b = run_unshocked(&f, &s).unwrap();
        assert_eq!(a.shocked_path, b.shocked_path);
        for (x, y) in a.irfs.iter().zip(&b.irfs) {
            for (u, v) in x.responses.iter().zip(&y.responses) {
                assert!((u - v).abs() <= 1e-10);
            }
        }
        assert!(a.lags.aic_selected.is_some_and(|l| l >= 1));
    }

    #[test]
    fn positive_shock_lifts_dependent_variable() {
        let f = panel(150, 3);
        let mut s = scenario(&f, 1.15);
        s.start = f.end().offset(3);
        let base = run_unshocked(&f, &s).unwrap();
        let hit = run_three_stage(&f, &s).unwrap();
        // locality: the path before the start is untouched
        for i in 0..2 {
            assert_eq!(hit.shocked_path.values()[i], base.shocked_path.values()[i]);
            assert_eq!(hit.stage2_forecast.row(i), base.stage2_forecast.row(i));
        }
        let cum = |r: &PipelineResult| {
            let mut acc = 0.0;
            r.stage2_forecast.column("b").unwrap().values().iter().map(|v| { acc += v; acc }).collect::<Vec<_>>()
        };
        let (cb, ch) = (cum(&base), cum(&hit));
        for h in 2..12 {
            assert!(ch[h] > cb[h] + 1.0, "h={h}: {} vs {}", ch[h], cb[h]);
        }
    }

    #[test]
    fn errors_name_their_stage() {
        let f = panel(60, 4);
        let mut s = scenario(&f, 1.1);
        s.vecm_rank = 3;
        assert!(matches!(run_three_stage(&f, &s), Err(Error::Stage { stage: 1, .. })));
        let mut s = scenario(&f, 1.1);
        s.stage2_lags = Some(40);
        assert!(matches!(run_three_stage(&f, &s), Err(Error::Stage { stage: 2, .. })));
        let mut s = scenario(&f, 1.1);
        s.start = f.end();
        assert!(matches!(run_three_stage(&f, &s), Err(Error::OutOfRange(..))));
        let mut s = scenario(&f, 1.1);
        s.target = "zzz".into();
        assert!(run_three_stage(&f, &s).is_err());
    }

    #[test]
    fn writes_output_directory() {
        let f = panel(80, 5);
        let r = run_three_stage(&f, &scenario(&f, 1.15)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = r.write_dir(dir.path()).unwrap();
        for name in ["stage1_forecast.csv", "shocked_path.csv", "stage2_forecast.csv", "stage3_model.json", "irf_a_b.csv", "audit.json"] {
            assert!(files.iter().any(|p| p.ends_with(name)), "{name}");
        }
        let audit: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("audit.json")).unwrap()).unwrap();
        assert_eq!(audit["irf_scale"], "differenced");
    }
}
