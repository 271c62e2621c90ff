use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value at node {node}, component {component}")]
    NonFinite { node: usize, component: usize },

    #[error("inadmissible state at node {node}: {reason}")]
    Inadmissible { node: usize, reason: String },

    #[error("domain error: {constraint} violated ({detail})")]
    Domain { constraint: &'static str, detail: String },

    #[error("time step too large near bounds at node {node}: auxiliary component {component} = {value:e}")]
    StepTooLarge { node: usize, component: usize, value: f64 },

    #[error(
        "correction infeasible: bounds leave no room for mass defect {defect_norm:e} (pooled distance {pooled:e})"
    )]
    CorrectionInfeasible { defect_norm: f64, pooled: f64 },

    #[error("Riemann data generates vacuum")]
    Vacuum,

    #[error("exact Riemann solver did not converge after {0} iterations")]
    RiemannNoConvergence(usize),

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(constraint: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            constraint,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
