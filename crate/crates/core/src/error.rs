use std::path::PathBuf;

use crate::linsolve::SolveReport;

/// Errors produced by the solver, scenario builders and I/O layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("field dimensions {found:?} do not match expected {expected:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("coefficient must be non-negative, found {0}")]
    NegativeCoefficient(f64),

    #[error("{system} solve did not converge: {report}")]
    SolverDiverged {
        system: &'static str,
        report: SolveReport,
    },

    #[error("momentum mass coefficient is not positive (min {0:e}); reduce dt or check alpha")]
    NonPositiveMass(f64),

    #[error("second-order history is missing for {0}")]
    MissingHistory(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("unknown scenario '{name}', available: {available}")]
    UnknownScenario { name: String, available: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
