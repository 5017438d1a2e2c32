use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the engine pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("function undefined at eigenvalue {0}")]
    Domain(f64),

    #[error("reference state is singular (smallest eigenvalue {0:e}); divergence is unbounded")]
    SingularReference(f64),

    #[error("no grid point operates in the engine regime")]
    NoEngineRegime,

    #[error("grid not closed under phi -> phi + pi (phi_steps = {0} must be even)")]
    GridNotClosed(usize),

    #[error("cycle failed at grid point alpha={alpha}, phi={phi}: {source}")]
    GridPoint {
        alpha: f64,
        phi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
