use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("bulk energy {value:e} is not positive (increase the additive constant)")]
    NonPositiveBulk { value: f64 },

    #[error("dense oracle limited to 16x16 grids, got {nx}x{ny}")]
    GridTooLarge { nx: usize, ny: usize },

    #[error("dense factorization failed")]
    Singular,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("scheme {scheme} cannot step from this state: {reason}")]
    StateMismatch { scheme: &'static str, reason: &'static str },

    #[error("energy law violated at step {step}: {detail}")]
    EnergyLaw { step: usize, detail: String },

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors produced by validating user input rather than by running a scheme.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::InvalidGrid(_) | Error::InvalidParameter { .. }
        )
    }

    /// True for failures that surface while time stepping.
    pub fn is_runtime(&self) -> bool {
        matches!(
            self,
            Error::StepFailed { .. }
                | Error::NonPositiveBulk { .. }
                | Error::EnergyLaw { .. }
                | Error::NonFinite(_)
        )
    }
}
