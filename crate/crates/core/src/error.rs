use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the model, solvers and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("sample time {t} outside [{t0}, {tf}]")]
    OutOfRange { t: f64, t0: f64, tf: f64 },

    #[error("R0 = {r0} <= 1, no endemic equilibrium")]
    NoEndemicEquilibrium { r0: f64 },

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("degenerate value: {0}")]
    DegenerateValue(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("months not consecutive: {prev} followed by {next}")]
    Gap { prev: String, next: String },

    #[error("negative case count {value} at month {month}")]
    NegativeCount { month: String, value: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empirical series has zero norm")]
    ZeroNorm,

    #[error("invalid fit specification: {0}")]
    InvalidSpec(String),

    #[error("series are not on the same grid")]
    GridMismatch,

    #[error("initial infectious value is zero")]
    ZeroInitial,

    #[error("no cases averted, ACER undefined")]
    ZeroAverted,

    #[error("shooting Newton iteration diverged: {0}")]
    NewtonDivergence(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
