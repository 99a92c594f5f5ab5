use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("Fock truncation too small: dim {dim}, top-level weight {tail_weight:e}")]
    Truncation { dim: usize, tail_weight: f64 },

    #[error("degenerate cat state: normalization {0:e}")]
    DegenerateCat(f64),

    #[error("space error: {0}")]
    Space(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate denominator in {term}: {value:e}")]
    DegenerateDenominator { term: &'static str, value: f64 },

    #[error("non-finite values in {0}")]
    NonFinite(&'static str),

    #[error("positivity violated during propagation: minimum eigenvalue {0:e}")]
    Positivity(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Io { .. } | Error::Json(_) | Error::Csv(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
