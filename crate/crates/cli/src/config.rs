//! Run configuration: a TOML file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use vecmkit::diagnostics::Deterministic;
use vecmkit::QuarterIndex;

use crate::error::{CliError, CliResult};

pub const CONFIG_ENV: &str = "VECMKIT_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AdfSpec {
    None,
    Constant,
    Trend,
}

impl From<AdfSpec> for Deterministic {
    fn from(s: AdfSpec) -> Self {
        match s {
            AdfSpec::None => Deterministic::None,
            AdfSpec::Constant => Deterministic::Constant,
            AdfSpec::Trend => Deterministic::ConstantTrend,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dataset: Option<PathBuf>,
    variables: Option<Vec<String>>,
    output_dir: Option<PathBuf>,
    lags: Option<usize>,
    rank: Option<usize>,
    johansen_lags: Option<usize>,
    horizon: Option<usize>,
    irf_horizon: Option<usize>,
    ordering: Option<Vec<String>>,
    impulse: Option<String>,
    response: Option<String>,
    holdout: Option<usize>,
    #[serde(default)]
    tests: FileTests,
    shock: Option<FileShock>,
    lq: Option<LqInputs>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTests {
    max_lag: Option<usize>,
    adf_spec: Option<AdfSpec>,
    adf_lags: Option<usize>,
    lm_lags: Option<usize>,
    n_eff: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileShock {
    target: Option<String>,
    factor: Option<f64>,
    start: Option<QuarterIndex>,
    stage2_lags: Option<usize>,
    stage3_lags: Option<usize>,
    exog_lags: Option<usize>,
    aic_max_lag: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LqInputs {
    pub region_industry: f64,
    pub region_total: f64,
    pub nation_industry: f64,
    pub nation_total: f64,
}

/// Flags shared by every command; each one overrides the file value.
#[derive(Debug, Default, Clone, Args)]
pub struct Overrides {
    /// Configuration file (TOML).
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Input CSV with a `quarter` column.
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,
    /// Variables to load, comma separated, in model order.
    #[arg(long, global = true, value_delimiter = ',')]
    pub variables: Option<Vec<String>>,
    #[arg(long, short = 'o', global = true)]
    pub output_dir: Option<PathBuf>,
    /// Lag order in levels for VECM-based commands.
    #[arg(long, global = true)]
    pub lags: Option<usize>,
    /// Cointegration rank; defaults to the trace-test selection.
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Lag order for the rank test; defaults to `lags`.
    #[arg(long, global = true)]
    pub johansen_lags: Option<usize>,
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    #[arg(long, global = true)]
    pub irf_horizon: Option<usize>,
    /// Cholesky ordering for impulse responses, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ordering: Option<Vec<String>>,
    #[arg(long, global = true)]
    pub impulse: Option<String>,
    #[arg(long, global = true)]
    pub response: Option<String>,
    /// Trailing quarters held out by `backtest`.
    #[arg(long, global = true)]
    pub holdout: Option<usize>,
    #[arg(long, global = true)]
    pub max_lag: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub adf_spec: Option<AdfSpec>,
    #[arg(long, global = true)]
    pub adf_lags: Option<usize>,
    /// LM tests are run for lags 1..=lm_lags.
    #[arg(long, global = true)]
    pub lm_lags: Option<usize>,
    /// Sample size used by the normality tests.
    #[arg(long, global = true)]
    pub n_eff: Option<usize>,
    #[arg(long, global = true)]
    pub target: Option<String>,
    #[arg(long, global = true)]
    pub factor: Option<f64>,
    #[arg(long, global = true)]
    pub shock_start: Option<QuarterIndex>,
    #[arg(long, global = true)]
    pub stage2_lags: Option<usize>,
    #[arg(long, global = true)]
    pub stage3_lags: Option<usize>,
    #[arg(long, global = true)]
    pub exog_lags: Option<usize>,
    #[arg(long, global = true)]
    pub aic_max_lag: Option<usize>,
    #[arg(long, global = true)]
    pub region_industry: Option<f64>,
    #[arg(long, global = true)]
    pub region_total: Option<f64>,
    #[arg(long, global = true)]
    pub nation_industry: Option<f64>,
    #[arg(long, global = true)]
    pub nation_total: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOptions {
    pub max_lag: usize,
    pub adf_spec: AdfSpec,
    pub adf_lags: Option<usize>,
    pub lm_lags: usize,
    pub n_eff: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShockOptions {
    pub target: Option<String>,
    pub factor: Option<f64>,
    /// Defaults to the first forecast quarter.
    pub start: Option<QuarterIndex>,
    pub stage2_lags: Option<usize>,
    pub stage3_lags: Option<usize>,
    pub exog_lags: usize,
    pub aic_max_lag: usize,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    /// Empty means every column in the file.
    pub variables: Vec<String>,
    pub output_dir: PathBuf,
    pub lags: Option<usize>,
    pub rank: Option<usize>,
    pub johansen_lags: Option<usize>,
    pub horizon: usize,
    pub irf_horizon: usize,
    pub ordering: Option<Vec<String>>,
    pub impulse: Option<String>,
    pub response: Option<String>,
    pub holdout: usize,
    pub tests: TestOptions,
    pub shock: ShockOptions,
    pub lq: Option<LqInputs>,
}

impl RunConfig {
    pub fn dataset(&self) -> CliResult<&Path> {
        self.dataset.as_deref().ok_or(CliError::MissingKey {
            key: "dataset".into(),
            hint: Some("set it in the config file or pass --dataset"),
        })
    }

    pub fn lags(&self) -> CliResult<usize> {
        self.lags.ok_or(CliError::MissingKey {
            key: "lags".into(),
            hint: Some("pass --lags or set `lags`; `lagselect` suggests a value"),
        })
    }
}

fn describe_toml_error(path: &Path, err: serde_path_to_error::Error<toml::de::Error>) -> CliError {
    let at = err.path().to_string();
    let message = err.inner().message().to_string();
    if let Some(rest) = message.strip_prefix("unknown field `") {
        let field = rest.split('`').next().unwrap_or_default();
        let key = if at == "." || at.is_empty() {
            field.to_string()
        } else if at == field || at.ends_with(&format!(".{field}")) {
            at
        } else {
            format!("{at}.{field}")
        };
        return CliError::UnknownKey { key };
    }
    if at == "." || at.is_empty() {
        return CliError::Syntax {
            path: path.to_path_buf(),
            message,
        };
    }
    CliError::InvalidValue { key: at, message }
}

fn read_file_config(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text, path)
}

fn parse_config_text(text: &str, path: &Path) -> CliResult<FileConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::Syntax {
        path: path.to_path_buf(),
        message: e.message().to_string(),
    })?;
    serde_path_to_error::deserialize(de).map_err(|e| describe_toml_error(path, e))
}

fn positive(key: &str, value: usize) -> CliResult<usize> {
    if value == 0 {
        return Err(CliError::InvalidValue {
            key: key.into(),
            message: "must be at least 1".into(),
        });
    }
    Ok(value)
}

/// Merges the optional config file with flag overrides.
///
/// Relative paths in the file are taken relative to the file's directory.
pub fn parse_config(overrides: &Overrides) -> CliResult<RunConfig> {
    let (file, base) = match &overrides.config {
        Some(path) => (read_file_config(path)?, path.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (FileConfig::default(), PathBuf::new()),
    };
    let anchor = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
    let o = overrides.clone();
    let shock = file.shock.unwrap_or_default();

    let lq = match (o.region_industry, o.region_total, o.nation_industry, o.nation_total) {
        (None, None, None, None) => file.lq,
        (a, b, c, d) => {
            let base = file.lq;
            let pick = |flag: Option<f64>, from: Option<f64>, key: &str| {
                flag.or(from).ok_or(CliError::MissingKey {
                    key: format!("lq.{key}"),
                    hint: Some("all four location-quotient inputs are needed"),
                })
            };
            Some(LqInputs {
                region_industry: pick(a, base.map(|l| l.region_industry), "region_industry")?,
                region_total: pick(b, base.map(|l| l.region_total), "region_total")?,
                nation_industry: pick(c, base.map(|l| l.nation_industry), "nation_industry")?,
                nation_total: pick(d, base.map(|l| l.nation_total), "nation_total")?,
            })
        }
    };

    let cfg = RunConfig {
        dataset: o.dataset.or(file.dataset.map(anchor)),
        variables: o.variables.or(file.variables).unwrap_or_default(),
        output_dir: o
            .output_dir
            .or(file.output_dir.map(anchor))
            .unwrap_or_else(|| PathBuf::from("vecmkit-out")),
        lags: o.lags.or(file.lags).map(|v| positive("lags", v)).transpose()?,
        rank: o.rank.or(file.rank),
        johansen_lags: o
            .johansen_lags
            .or(file.johansen_lags)
            .map(|v| positive("johansen_lags", v))
            .transpose()?,
        horizon: positive("horizon", o.horizon.or(file.horizon).unwrap_or(vecmkit::irf::DEFAULT_HORIZON))?,
        irf_horizon: positive(
            "irf_horizon",
            o.irf_horizon.or(file.irf_horizon).unwrap_or(vecmkit::irf::DEFAULT_HORIZON),
        )?,
        ordering: o.ordering.or(file.ordering),
        impulse: o.impulse.or(file.impulse),
        response: o.response.or(file.response),
        holdout: positive("holdout", o.holdout.or(file.holdout).unwrap_or(8))?,
        tests: TestOptions {
            max_lag: positive("tests.max_lag", o.max_lag.or(file.tests.max_lag).unwrap_or(4))?,
            adf_spec: o.adf_spec.or(file.tests.adf_spec).unwrap_or(AdfSpec::Constant),
            adf_lags: o.adf_lags.or(file.tests.adf_lags),
            lm_lags: positive("tests.lm_lags", o.lm_lags.or(file.tests.lm_lags).unwrap_or(2))?,
            n_eff: o.n_eff.or(file.tests.n_eff),
        },
        shock: ShockOptions {
            target: o.target.or(shock.target),
            factor: o.factor.or(shock.factor),
            start: o.shock_start.or(shock.start),
            stage2_lags: o.stage2_lags.or(shock.stage2_lags).map(|v| positive("shock.stage2_lags", v)).transpose()?,
            stage3_lags: o.stage3_lags.or(shock.stage3_lags).map(|v| positive("shock.stage3_lags", v)).transpose()?,
            exog_lags: o.exog_lags.or(shock.exog_lags).unwrap_or(0),
            aic_max_lag: positive("shock.aic_max_lag", o.aic_max_lag.or(shock.aic_max_lag).unwrap_or(4))?,
        },
        lq,
    };
    if let Some(path) = &cfg.dataset {
        if !path.is_file() {
            return Err(CliError::InvalidValue {
                key: "dataset".into(),
                message: format!("{} does not exist", path.display()),
            });
        }
    }
    if let Some(f) = cfg.shock.factor {
        if !(f > 0.0 && f.is_finite()) {
            return Err(CliError::InvalidValue {
                key: "shock.factor".into(),
                message: format!("must be positive, got {f}"),
            });
        }
    }
    Ok(cfg)
}
