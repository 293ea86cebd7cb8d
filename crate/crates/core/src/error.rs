use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate projection: |b3| = {0:e} is below the division guard")]
    DegenerateProjection(f64),

    #[error("singular homography: {0}")]
    SingularHomography(String),

    #[error("invalid box: width {w}, height {h}")]
    InvalidBox { w: f64, h: f64 },

    #[error("noise window is empty")]
    EmptyWindow,

    #[error("degenerate model mixing: {0}")]
    DegenerateMixing(String),

    #[error("singular innovation covariance (det = {0:e})")]
    SingularInnovation(f64),

    #[error("box buffer is empty")]
    EmptyBuffer,

    #[error("both association likelihoods are zero")]
    ZeroLikelihoods,

    #[error("invalid confidence thresholds: d_low = {d_low}, d_high = {d_high}")]
    InvalidThresholds { d_low: f64, d_high: f64 },

    #[error("frame {got} does not follow frame {prev}")]
    NonMonotonicFrame { prev: i64, got: i64 },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid scene spec: {0}")]
    InvalidSpec(String),

    #[error("objective failed at {params:?}: {msg}")]
    ObjectiveFailure { params: Vec<f64>, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, msg: msg.into() }
    }
}
