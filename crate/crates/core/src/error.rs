use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("{op}: level {found} is too small (need at least {required})")]
    LevelTooSmall {
        op: &'static str,
        required: usize,
        found: usize,
    },

    #[error("basis is not linearly independent (numerical rank {rank} < {count})")]
    DependentBasis { rank: usize, count: usize },

    #[error("invalid operator space: {0}")]
    InvalidSpace(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("assembled dimension {size} exceeds cap {cap}")]
    DimensionCap { size: usize, cap: usize },

    #[error("no tensor representation available: {0}")]
    NoRepresentation(String),

    #[error("inconsistent bracket: lower {lower} > upper {upper}")]
    InconsistentBracket { lower: f64, upper: f64 },

    #[error("malformed data: {0}")]
    Malformed(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(
    op: &'static str,
    expected: impl std::fmt::Display,
    found: impl std::fmt::Display,
) -> Error {
    Error::DimensionMismatch {
        op,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
