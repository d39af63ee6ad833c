use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("{path}: {message} (line {line}, column {column})")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{path}: unknown channel reference \"{name}\"")]
    UnknownChannelRef { path: String, name: String },
    #[error("{path}: not a channel: {source}")]
    NotAChannel {
        path: String,
        #[source]
        source: noisy_mbqc::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SpecError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError::Invalid { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("case {case}: {source}")]
    Case {
        case: String,
        #[source]
        source: noisy_mbqc::Error,
    },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: noisy_mbqc::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    ResourceFile {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
