use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("no usable rows remain after dropping missing values")]
    NoUsableRows,

    #[error("non-numeric value `{value}` in column `{column}` at data row {row}")]
    NonNumeric {
        column: String,
        row: usize,
        value: String,
    },

    #[error("column `{0}` has zero sample variance")]
    ZeroVariance(String),

    #[error("input vector is constant")]
    ConstantInput,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("need n >= p + 2 observations, got n = {n}, p = {p}")]
    TooFewRows { n: usize, p: usize },

    #[error(
        "design is rank deficient: smallest eigenvalue {smallest:e} below tolerance {tolerance:e}"
    )]
    RankDeficient { smallest: f64, tolerance: f64 },

    #[error("penalized least-squares system is singular")]
    SingularSystem,

    #[error("too few distinct x values ({distinct}) for a spline basis")]
    TooFewDistinct { distinct: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("extent m = {m} outside [0, {p}]")]
    ExtentOutOfRange { m: f64, p: usize },

    #[error("unknown column name `{0}`")]
    UnknownName(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
