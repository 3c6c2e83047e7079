use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the ADC model toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("unmappable column: {0}")]
    UnmappableColumn(String),

    #[error("no valid rows in {0}")]
    EmptyCorpus(PathBuf),

    #[error("degenerate corpus: {0}")]
    DegenerateCorpus(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model missing {0}")]
    MissingMetadata(&'static str),

    #[error("unsupported model format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be finite and > 0, got {value}"
        )))
    }
}
