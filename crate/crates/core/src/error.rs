//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("xml error in {path} at line {line}: {message}")]
    Xml {
        path: String,
        line: u32,
        message: String,
    },

    #[error("unsupported input in {path}: {message}")]
    UnsupportedFormat { path: String, message: String },

    #[error("schema error in {path}: {message}")]
    Schema { path: String, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("catalogue error: {0}")]
    Catalogue(String),

    #[error("store error: {0}")]
    Store(String),

    #[error("enrichment error: {0}")]
    Enrichment(String),

    #[error("rule file error: {0}")]
    RuleFile(String),

    #[error("export error: {0}")]
    Export(String),

    #[error("report error: {0}")]
    Report(String),

    #[error("integrity violation: {0}")]
    Integrity(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
