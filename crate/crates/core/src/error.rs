use thiserror::Error;

/// Errors raised by the algebraic solvers, the line model and the analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("graph is not strongly connected (matrix is reducible)")]
    Reducible,

    #[error("zero-duration cycle through node {node}: the system is fully implicit")]
    ZeroDurationCycle { node: usize },

    #[error("fully implicit system: no explicit update order exists (0 or all segments occupied, m = {trains}, n = {segments})")]
    FullyImplicit { trains: usize, segments: usize },

    #[error("implicit dependencies form a cycle through component {node}")]
    ImplicitCycle { node: usize },

    #[error("empty graph")]
    EmptyGraph,

    #[error("invalid line configuration: {0}")]
    InvalidConfig(String),

    #[error("train count {trains} outside 0..={segments}")]
    TrainCount { trains: usize, segments: usize },

    #[error("control gain {value} at node {node} outside [0, 1]")]
    ControlGain { node: usize, value: f64 },

    #[error("density {rho} outside [0, {max}]")]
    DensityOutOfRange { rho: f64, max: f64 },

    #[error("policy iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("unknown demand profile `{0}`")]
    UnknownProfile(String),

    #[error("json: {0}")]
    Json(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
