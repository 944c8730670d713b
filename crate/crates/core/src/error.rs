use thiserror::Error;

/// Errors raised by the signal, channel and link models.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty time series")]
    EmptySeries,

    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },

    #[error("time grids differ: (t0 = {t0_a}, dt = {dt_a}) vs (t0 = {t0_b}, dt = {dt_b})")]
    GridMismatch {
        t0_a: f64,
        dt_a: f64,
        t0_b: f64,
        dt_b: f64,
    },

    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("units cannot be combined: {0} and {1}")]
    UnitMismatch(String, String),

    #[error("explicit scheme unstable: dt = {dt} exceeds the admissible maximum {max_dt}")]
    Unstable { dt: f64, max_dt: f64 },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("{0}")]
    Domain(String),

    #[error("trial {index} failed: {source}")]
    Trial { index: usize, source: Box<Error> },

    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Box<Error> },

    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Tags an error with the pipeline stage that raised it.
    pub fn at(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            reason: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Returns an `InvalidParameter` error unless `cond` holds.
pub(crate) fn ensure(cond: bool, name: &'static str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::param(name, reason))
    }
}
