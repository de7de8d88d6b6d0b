//! Error type shared by every estimator in the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by ingestion, estimation and testing routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quarter label {token:?}: {reason}")]
    QuarterParse { token: String, reason: String },

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path} at row {row}: {message}")]
    Csv {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path} is empty (no header or no data rows)")]
    EmptyFile { path: PathBuf },

    #[error("missing column {column:?}")]
    MissingColumn { column: String },

    #[error("duplicate column {column:?}")]
    DuplicateColumn { column: String },

    #[error("quarters not contiguous at row {row}: expected {expected}, found {found}")]
    NonContiguous {
        row: usize,
        expected: String,
        found: String,
    },

    #[error("non-numeric value {value:?} at row {row}, column {column:?}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("non-finite value at index {index} of series {series:?}")]
    NonFinite { series: String, index: usize },

    #[error("insufficient data for {context}: need {needed}, have {available}")]
    InsufficientData {
        context: String,
        needed: usize,
        available: usize,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular design matrix: {0}")]
    SingularDesign(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("cointegration rank {rank} out of range for {vars} variables: {hint}")]
    RankOutOfRange {
        rank: usize,
        vars: usize,
        hint: &'static str,
    },

    #[error("unknown variable {0:?}")]
    UnknownVariable(String),

    #[error("exogenous values missing for quarter {0}")]
    Coverage(String),

    #[error("{0} is outside the series range {1}..{2}")]
    OutOfRange(String, String, String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: u8,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn insufficient(context: impl Into<String>, needed: usize, available: usize) -> Self {
        Error::InsufficientData {
            context: context.into(),
            needed,
            available,
        }
    }

    /// Wraps an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: u8) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Stable short identifier for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::QuarterParse { .. } => "quarter_parse",
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
            Error::EmptyFile { .. } => "empty_file",
            Error::MissingColumn { .. } => "missing_column",
            Error::DuplicateColumn { .. } => "duplicate_column",
            Error::NonContiguous { .. } => "non_contiguous",
            Error::NonNumeric { .. } => "non_numeric",
            Error::NonFinite { .. } => "non_finite",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::Dimension(_) => "dimension",
            Error::SingularDesign(_) => "singular_design",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::NotSymmetric(_) => "not_symmetric",
            Error::Domain(_) => "domain",
            Error::Degenerate(_) => "degenerate",
            Error::RankOutOfRange { .. } => "rank_out_of_range",
            Error::UnknownVariable(_) => "unknown_variable",
            Error::Coverage(_) => "coverage",
            Error::OutOfRange(..) => "out_of_range",
            Error::Stage { .. } => "stage",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
