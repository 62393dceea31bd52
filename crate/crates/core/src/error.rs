use std::path::PathBuf;

/// Errors raised across the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration became non-finite at t = {t}")]
    Step { t: f64 },

    #[error("truncation tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    Tail { bound: f64, tolerance: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("fit window error: {0}")]
    Window(String),

    #[error("phase unwrap error: {0}")]
    Unwrap(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("blow-up detected at t = {t} (max |u| = {max_abs:e})")]
    Blowup { t: f64, max_abs: f64 },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
