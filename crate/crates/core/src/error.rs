use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the clustering library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("dataset too small: need at least {needed} points, got {got}")]
    DatasetTooSmall { needed: usize, got: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed for {dataset}: {message}")]
    Validation { dataset: String, message: String },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Non-fatal conditions recorded while clustering.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Warning {
    /// A feature has zero range and was left out of the density product.
    ZeroRangeDimension { dim: usize },
    /// The bandwidth fixed point could not be bracketed; the Gaussian-reference
    /// rule was used instead.
    BandwidthFallback { dim: usize, t: f64 },
    /// No positive turning angle at or after the regression split.
    FlatTurningAngles { p_r: usize },
    /// Too few points for noise identification; every point treated as dense.
    NoiseIdSkipped { n: usize },
}
