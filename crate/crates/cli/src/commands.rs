//! One function per subcommand; each returns its text report and the files it wrote.

use std::path::{Path, PathBuf};

use clap::Subcommand;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use vecmkit::diagnostics::{
    adf_test, lag_order_selection, lm_autocorrelation, normality_suite, vecm_stability, AdfResult, LmResult,
};
use vecmkit::irf::{orthogonalized_irfs, IrfResult};
use vecmkit::report::{sig, TextTable};
use vecmkit::shock::{run_three_stage, ShockScenario};
use vecmkit::timeseries::{difference_series, load_frame, location_quotient, summary_stats};
use vecmkit::vecm::{fit_vecm, forecast_vecm, johansen_trace, vecm_to_levels_var, VecmFit};
use vecmkit::{Frame, Matrix};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Summary statistics of every variable.
    Describe,
    /// Augmented Dickey-Fuller tests in levels and first differences.
    Adf,
    /// Lag-order selection criteria.
    Lagselect,
    /// Johansen trace test for the cointegration rank.
    Johansen,
    /// Estimate the VECM.
    FitVec,
    /// Residual autocorrelation, normality and stability checks.
    Diagnose,
    /// Orthogonalized impulse responses of the fitted model.
    Irf,
    /// Out-of-sample forecasts.
    Forecast,
    /// Refit without the trailing quarters and compare forecasts with actuals.
    Backtest,
    /// Three-stage exogenous shock analysis.
    Shock,
    /// Location quotient from four employment figures.
    Lq,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Describe => "describe",
            Command::Adf => "adf",
            Command::Lagselect => "lagselect",
            Command::Johansen => "johansen",
            Command::FitVec => "fit-vec",
            Command::Diagnose => "diagnose",
            Command::Irf => "irf",
            Command::Forecast => "forecast",
            Command::Backtest => "backtest",
            Command::Shock => "shock",
            Command::Lq => "lq",
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub artifacts: Vec<PathBuf>,
}

struct Run<'a> {
    cfg: &'a RunConfig,
    command: Command,
    dir: PathBuf,
    digest: Option<String>,
    artifacts: Vec<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl<'a> Run<'a> {
    fn new(cfg: &'a RunConfig, command: Command) -> CliResult<Self> {
        let dir = cfg.output_dir.join(command.name());
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(Self {
            cfg,
            command,
            dir,
            digest: None,
            artifacts: Vec::new(),
        })
    }

    fn load(&mut self) -> CliResult<Frame> {
        let path = self.cfg.dataset()?;
        let bytes = std::fs::read(path).map_err(io_err(path))?;
        self.digest = Some(hex::encode(Sha256::digest(&bytes)));
        Ok(load_frame(path, &self.cfg.variables)?)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let p = self.path(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| vecmkit::Error::Domain(e.to_string()))?;
        std::fs::write(&p, text).map_err(io_err(&p))?;
        self.artifacts.push(p);
        Ok(())
    }

    fn csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let p = self.path(name);
        let file = std::fs::File::create(&p).map_err(io_err(&p))?;
        let mut w = csv::Writer::from_writer(file);
        let bad = |e: csv::Error| vecmkit::Error::Domain(format!("writing {name}: {e}"));
        w.write_record(header).map_err(bad)?;
        for row in rows {
            w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(bad)?;
        }
        w.flush().map_err(io_err(&p))?;
        self.artifacts.push(p);
        Ok(())
    }

    fn frame_csv(&mut self, name: &str, frame: &Frame) -> CliResult<()> {
        let p = self.path(name);
        frame.write_csv_file(&p)?;
        self.artifacts.push(p);
        Ok(())
    }

    fn finish(mut self, report: String, extra: serde_json::Value) -> CliResult<Outcome> {
        let mut audit = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command.name(),
            "config": self.cfg,
            "dataset_sha256": self.digest,
            "artifacts": self.artifacts.iter().map(|p| p.file_name().unwrap().to_string_lossy()).collect::<Vec<_>>(),
        });
        if !extra.is_null() {
            audit["details"] = extra;
        }
        let p = self.path("audit.json");
        let text = serde_json::to_string_pretty(&audit).map_err(|e| vecmkit::Error::Domain(e.to_string()))?;
        std::fs::write(&p, text).map_err(io_err(&p))?;
        self.artifacts.push(p);
        Ok(Outcome {
            report,
            artifacts: self.artifacts,
        })
    }
}

pub fn execute(cfg: &RunConfig, command: Command) -> CliResult<Outcome> {
    let mut run = Run::new(cfg, command)?;
    match command {
        Command::Describe => describe(&mut run),
        Command::Adf => adf(&mut run),
        Command::Lagselect => lagselect(&mut run),
        Command::Johansen => johansen(&mut run),
        Command::FitVec => fit_vec(&mut run),
        Command::Diagnose => diagnose(&mut run),
        Command::Irf => irf(&mut run),
        Command::Forecast => forecast(&mut run),
        Command::Backtest => backtest(&mut run),
        Command::Shock => shock(&mut run),
        Command::Lq => lq(&mut run),
    }
    .and_then(|(report, extra)| run.finish(report, extra))
}

type Step = CliResult<(String, serde_json::Value)>;

fn describe(run: &mut Run) -> Step {
    let frame = run.load()?;
    let stats = summary_stats(&frame)?;
    run.json("describe.json", &stats)?;
    run.csv(
        "describe.csv",
        &["variable", "mean", "sd", "min", "max", "n"],
        stats.columns.iter().map(|c| {
            [c.name.clone(), c.mean.to_string(), c.sd.to_string(), c.min.to_string(), c.max.to_string(), c.count.to_string()]
        }),
    )?;
    Ok((stats.to_table().render(), serde_json::Value::Null))
}

fn adf(run: &mut Run) -> Step {
    let lags = run.cfg.tests.adf_lags.ok_or(CliError::MissingKey {
        key: "tests.adf_lags".into(),
        hint: Some("the ADF lag length is not chosen automatically; pass --adf-lags"),
    })?;
    let spec = run.cfg.tests.adf_spec.into();
    let frame = run.load()?;
    let mut results = Vec::new();
    for s in frame.columns() {
        results.push(adf_test(s, lags, spec)?);
        let mut d = difference_series(s)?;
        d.name = format!("D_{}", s.name);
        results.push(adf_test(&d, lags, spec)?);
    }
    run.json("adf.json", &results)?;
    run.csv(
        "adf.csv",
        &["series", "statistic", "cv_1pct", "cv_5pct", "cv_10pct", "lags", "nobs", "reject_5pct"],
        results.iter().map(|r| {
            let c = r.critical_values;
            [
                r.series.clone(),
                r.statistic.to_string(),
                c.one.to_string(),
                c.five.to_string(),
                c.ten.to_string(),
                r.lags.to_string(),
                r.nobs.to_string(),
                r.reject.to_string(),
            ]
        }),
    )?;
    Ok((AdfResult::table(&results).render(), serde_json::Value::Null))
}

fn lagselect(run: &mut Run) -> Step {
    let frame = run.load()?;
    let rep = lag_order_selection(&frame, run.cfg.tests.max_lag)?;
    run.json("lagselect.json", &rep)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    run.csv(
        "lagselect.csv",
        &["lag", "ll", "lr", "df", "p", "fpe", "aic", "hqic", "sbic"],
        rep.rows.iter().map(|r| {
            [
                r.lag.to_string(),
                r.log_likelihood.to_string(),
                opt(r.lr),
                r.df.map(|d| d.to_string()).unwrap_or_default(),
                opt(r.p_value),
                r.criteria.fpe.to_string(),
                r.criteria.aic.to_string(),
                r.criteria.hqic.to_string(),
                r.criteria.sbic.to_string(),
            ]
        }),
    )?;
    Ok((rep.to_table().render(), json!({ "selected": rep.selected })))
}

fn johansen(run: &mut Run) -> Step {
    let frame = run.load()?;
    let k = run.cfg.johansen_lags.map_or_else(|| run.cfg.lags(), Ok)?;
    let res = johansen_trace(&frame, k)?;
    run.json("johansen.json", &res)?;
    run.csv(
        "johansen.csv",
        &["rank", "eigenvalue", "trace", "cv_5pct"],
        res.trace_statistics.iter().enumerate().map(|(r, t)| {
            [
                r.to_string(),
                res.eigenvalues[r].to_string(),
                t.to_string(),
                res.critical_values[r].map(|c| c.to_string()).unwrap_or_default(),
            ]
        }),
    )?;
    Ok((res.to_table().render(), json!({ "selected_rank": res.selected_rank })))
}

/// Explicit rank, or the trace-test choice at the rank-test lag order.
fn resolve_rank(run: &Run, frame: &Frame) -> CliResult<usize> {
    if let Some(r) = run.cfg.rank {
        return Ok(r);
    }
    let k = run.cfg.johansen_lags.map_or_else(|| run.cfg.lags(), Ok)?;
    johansen_trace(frame, k)?.selected_rank.ok_or(CliError::MissingKey {
        key: "rank".into(),
        hint: Some("the trace test has no tabulated critical value here; set it explicitly"),
    })
}

fn fit(run: &mut Run, frame: &Frame) -> CliResult<VecmFit> {
    let lags = run.cfg.lags()?;
    let rank = resolve_rank(run, frame)?;
    Ok(fit_vecm(frame, lags, rank)?)
}

fn matrix_table(title: &str, rows: &[String], cols: &[String], m: &Matrix) -> TextTable {
    let mut t = TextTable::new(std::iter::once(title.to_string()).chain(cols.iter().cloned()));
    for (i, name) in rows.iter().enumerate() {
        t.row(std::iter::once(name.clone()).chain((0..m.ncols()).map(|j| sig(m[(i, j)]))));
    }
    t
}

fn matrix_rows(rows: &[String], m: &Matrix) -> Vec<Vec<String>> {
    rows.iter()
        .enumerate()
        .map(|(i, n)| std::iter::once(n.clone()).chain(m.row(i).iter().map(|v| v.to_string())).collect())
        .collect()
}

fn fit_vec(run: &mut Run) -> Step {
    let frame = run.load()?;
    let model = fit(run, &frame)?;
    let ce: Vec<String> = (1..=model.rank).map(|i| format!("ce{i}")).collect();
    let header: Vec<&str> = std::iter::once("variable").chain(ce.iter().map(String::as_str)).collect();
    let p = run.path("vecm_model.json");
    std::fs::write(&p, model.to_json()?).map_err(io_err(&p))?;
    run.artifacts.push(p);
    run.csv("beta.csv", &header, matrix_rows(&model.names, &model.beta))?;
    run.csv("alpha.csv", &header, matrix_rows(&model.names, &model.alpha))?;
    let resid = Frame::from_matrix(model.sample.first, &model.names, &model.residuals)?;
    run.frame_csv("residuals.csv", &resid)?;

    let mut text = matrix_table("beta", &model.names, &ce, &model.beta).render();
    text.push('\n');
    text.push_str(&matrix_table("alpha", &model.names, &ce, &model.alpha).render());
    text.push_str(&format!(
        "\nrank {}  lags {}  sample {}-{} ({} obs)  log-likelihood {}\n",
        model.rank,
        model.lags,
        model.sample.first,
        model.sample.last,
        model.sample.observations,
        model.log_likelihood.map(sig).unwrap_or_else(|| "n/a".into())
    ));
    Ok((text, json!({ "rank": model.rank, "lags": model.lags })))
}

fn diagnose(run: &mut Run) -> Step {
    let frame = run.load()?;
    let model = fit(run, &frame)?;
    let lm: Vec<LmResult> = (1..=run.cfg.tests.lm_lags)
        .map(|lag| lm_autocorrelation(&model.residuals, model.design.as_ref(), lag))
        .collect::<vecmkit::Result<_>>()?;
    let names: Vec<String> = model.names.iter().map(|n| format!("D_{n}")).collect();
    let n_eff = run.cfg.tests.n_eff.unwrap_or(model.residuals.nrows());
    let normality = normality_suite(&model.residuals, &names, n_eff)?;
    let stability = vecm_stability(&model)?;

    run.json("diagnose.json", &json!({ "lm": lm, "normality": normality, "stability": stability }))?;
    run.csv(
        "lm.csv",
        &["lag", "chi2", "df", "p"],
        lm.iter().map(|r| [r.lag.to_string(), r.statistic.to_string(), r.df.to_string(), r.p_value.to_string()]),
    )?;
    run.csv(
        "normality.csv",
        &["equation", "skewness", "skewness_chi2", "skewness_p", "kurtosis", "kurtosis_chi2", "kurtosis_p", "jb", "jb_p"],
        normality.rows.iter().map(|r| {
            [
                r.equation.clone(),
                r.skewness.to_string(),
                r.skewness_chi2.to_string(),
                r.skewness_p.to_string(),
                r.kurtosis.to_string(),
                r.kurtosis_chi2.to_string(),
                r.kurtosis_p.to_string(),
                r.jarque_bera.to_string(),
                r.jarque_bera_p.to_string(),
            ]
        }),
    )?;
    run.csv(
        "stability_roots.csv",
        &["root", "modulus"],
        stability.moduli.iter().enumerate().map(|(i, m)| [(i + 1).to_string(), m.to_string()]),
    )?;
    let text = [
        LmResult::table(&lm).render(),
        normality.to_table().render(),
        stability.to_table().render(),
    ]
    .join("\n");
    Ok((text, json!({ "n_eff": n_eff, "stable": stability.pass })))
}

fn write_irf(run: &mut Run, r: &IrfResult) -> CliResult<()> {
    let p = run.path(&format!("irf_{}_{}.csv", r.impulse, r.response));
    r.write_csv_file(&p)?;
    run.artifacts.push(p);
    Ok(())
}

fn irf_table(irfs: &[IrfResult]) -> TextTable {
    let mut t = TextTable::new(
        std::iter::once("step".to_string()).chain(irfs.iter().map(|r| format!("{}->{}", r.impulse, r.response))),
    );
    let steps = irfs.first().map_or(0, |r| r.responses.len());
    for h in 0..steps {
        t.row(std::iter::once(h.to_string()).chain(irfs.iter().map(|r| sig(r.responses[h]))));
    }
    t
}

fn irf(run: &mut Run) -> Step {
    let mut frame = run.load()?;
    if let Some(order) = &run.cfg.ordering {
        frame = frame.select(order)?;
    }
    let model = fit(run, &frame)?;
    let set = orthogonalized_irfs(&vecm_to_levels_var(&model), run.cfg.irf_horizon)?;
    let irfs = match (&run.cfg.impulse, &run.cfg.response) {
        (Some(i), Some(r)) => vec![set.pair(i, r)?],
        (Some(i), None) => set.ordering.iter().map(|r| set.pair(i, r)).collect::<vecmkit::Result<_>>()?,
        (None, Some(r)) => set.ordering.iter().map(|i| set.pair(i, r)).collect::<vecmkit::Result<_>>()?,
        (None, None) => set.all_pairs(),
    };
    for r in &irfs {
        write_irf(run, r)?;
    }
    run.json("irf.json", &set)?;
    let mut text = String::new();
    for chunk in irfs.chunk_by(|a, b| a.impulse == b.impulse) {
        text.push_str(&format!("impulse: {}\n", chunk[0].impulse));
        text.push_str(&irf_table(chunk).render());
        text.push('\n');
    }
    Ok((text, json!({ "ordering": set.ordering, "scale": "levels" })))
}

fn forecast(run: &mut Run) -> Step {
    let frame = run.load()?;
    let model = fit(run, &frame)?;
    let fc = forecast_vecm(&model, run.cfg.horizon)?;
    run.frame_csv("forecast.csv", &fc)?;
    for s in fc.columns() {
        let name = format!("forecast_{}.csv", s.name);
        let quarters: Vec<String> = fc.quarters().map(|q| q.to_string()).collect();
        run.csv(&name, &["quarter", &s.name], quarters.into_iter().zip(s.values()).map(|(q, v)| [q, v.to_string()]))?;
    }
    run.json("forecast.json", &fc)?;
    let mut t = TextTable::new(std::iter::once("quarter".to_string()).chain(fc.names()));
    for (i, q) in fc.quarters().enumerate() {
        t.row(std::iter::once(q.to_string()).chain(fc.row(i).into_iter().map(sig)));
    }
    Ok((t.render(), json!({ "rank": model.rank, "lags": model.lags, "horizon": run.cfg.horizon })))
}

#[derive(Serialize)]
struct BacktestScore {
    variable: String,
    rmse: f64,
    mae: f64,
}

fn backtest(run: &mut Run) -> Step {
    let frame = run.load()?;
    let h = run.cfg.holdout;
    if h >= frame.len() {
        return Err(CliError::InvalidValue {
            key: "holdout".into(),
            message: format!("{h} leaves no estimation sample out of {} rows", frame.len()),
        });
    }
    let train = frame.slice(0, frame.len() - h)?;
    let model = fit(run, &train)?;
    let fc = forecast_vecm(&model, h)?;
    let actual = frame.slice(frame.len() - h, frame.len())?;
    let mut scores = Vec::new();
    let mut t = TextTable::new(["variable", "RMSE", "MAE"]);
    for name in frame.names() {
        let a = actual.column(&name)?.values();
        let f = fc.column(&name)?.values();
        let quarters: Vec<String> = actual.quarters().map(|q| q.to_string()).collect();
        run.csv(
            &format!("backtest_{name}.csv"),
            &["quarter", "actual", "forecast"],
            (0..h).map(|i| [quarters[i].clone(), a[i].to_string(), f[i].to_string()]),
        )?;
        let err: Vec<f64> = a.iter().zip(f).map(|(x, y)| x - y).collect();
        let score = BacktestScore {
            rmse: (err.iter().map(|e| e * e).sum::<f64>() / h as f64).sqrt(),
            mae: err.iter().map(|e| e.abs()).sum::<f64>() / h as f64,
            variable: name,
        };
        t.row([score.variable.clone(), sig(score.rmse), sig(score.mae)]);
        scores.push(score);
    }
    run.json("backtest.json", &scores)?;
    t.note(format!("held out {}-{} ({h} quarters)", actual.start(), actual.end()));
    Ok((t.render(), json!({ "holdout": h, "estimation_end": train.end().to_string() })))
}

fn shock(run: &mut Run) -> Step {
    let frame = run.load()?;
    let opts = &run.cfg.shock;
    let missing = |key: &str| CliError::MissingKey {
        key: format!("shock.{key}"),
        hint: None,
    };
    let target = opts.target.clone().ok_or_else(|| missing("target"))?;
    let factor = opts.factor.ok_or_else(|| missing("factor"))?;
    let lags = run.cfg.lags()?;
    let rank = resolve_rank(run, &frame)?;
    let mut scenario = ShockScenario::new(
        target,
        factor,
        opts.start.unwrap_or_else(|| frame.end().succ()),
        run.cfg.horizon,
        lags,
        rank,
    );
    scenario.stage2_lags = opts.stage2_lags;
    scenario.stage3_lags = opts.stage3_lags;
    scenario.exog_lags = opts.exog_lags;
    scenario.aic_max_lag = opts.aic_max_lag;
    scenario.irf_horizon = run.cfg.irf_horizon;
    let result = run_three_stage(&frame, &scenario)?;
    // the run-level audit replaces the pipeline's own audit.json, keeping it under `details`
    let written = result.write_dir(&run.dir)?;
    run.artifacts.extend(written.into_iter().filter(|p| !p.ends_with("audit.json")));
    let mut text = irf_table(&result.irfs).render();
    text.push_str(&format!(
        "\nresponses to a {} impulse, differenced scale; stage-2 lags {}, stage-3 lags {}\n",
        scenario.target, result.lags.stage2, result.lags.stage3
    ));
    Ok((text, result.audit_json()))
}

fn lq(run: &mut Run) -> Step {
    let inputs = run.cfg.lq.ok_or(CliError::MissingKey {
        key: "lq".into(),
        hint: Some("set the [lq] table or the --region-industry/--region-total/--nation-industry/--nation-total flags"),
    })?;
    let value = location_quotient(inputs.region_industry, inputs.region_total, inputs.nation_industry, inputs.nation_total)?;
    run.json("lq.json", &json!({ "inputs": inputs, "location_quotient": value }))?;
    Ok((format!("location quotient {}\n", sig(value)), serde_json::Value::Null))
}
