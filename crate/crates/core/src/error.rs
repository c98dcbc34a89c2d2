use thiserror::Error;

/// Errors raised by grid construction, norm engines, operators and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid axis: {0}")]
    InvalidAxis(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("weight must be strictly positive and finite (node {node}, value {value})")]
    NonPositiveWeight { node: usize, value: f64 },

    #[error("weight violates its separable majorant at node {0}")]
    MajorantViolated(usize),

    #[error("invalid exponent {value}: {reason}")]
    InvalidExponent { value: f64, reason: &'static str },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("{0} is not constant on the boxes of the partition")]
    NotBoxConstant(&'static str),

    #[error("insufficient decay: {0}")]
    InsufficientDecay(String),

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("norm descriptor for the {0} space is not set")]
    UnsetDescriptor(&'static str),

    #[error("spectral function is not summable: {0}")]
    NonSummable(String),

    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed data file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
