use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown configuration key `{key}`")]
    UnknownKey { key: String },

    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },

    #[error("missing required setting `{key}`{}", hint.map(|h| format!(" ({h})")).unwrap_or_default())]
    MissingKey { key: String, hint: Option<&'static str> },

    #[error("malformed configuration file {path}: {message}")]
    Syntax { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] vecmkit::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::UnknownKey { .. } => "unknown_key",
            CliError::InvalidValue { .. } => "invalid_value",
            CliError::MissingKey { .. } => "missing_key",
            CliError::Syntax { .. } => "config_syntax",
            CliError::Io { .. } => "io",
            CliError::Core(e) => e.kind(),
        }
    }

    /// The configuration key at fault, when there is one.
    pub fn key(&self) -> Option<&str> {
        match self {
            CliError::UnknownKey { key } | CliError::InvalidValue { key, .. } | CliError::MissingKey { key, .. } => Some(key),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        if let Some(key) = self.key() {
            body["key"] = json!(key);
        }
        if let CliError::Core(vecmkit::Error::Stage { stage, .. }) = self {
            body["stage"] = json!(stage);
        }
        json!({ "error": body })
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
