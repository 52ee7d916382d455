use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("simplex needs n+1 vertices of dimension n >= 1, got {vertices} vertices of dimension {dimension}")]
    MalformedSimplex { vertices: usize, dimension: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("non-finite network input at index {index}: {value}")]
    NonFiniteInput { index: usize, value: f64 },

    #[error("cart-pole state blew up after a step: {0:?}")]
    NonFiniteState([f64; 4]),

    #[error("batch statistics need at least one value")]
    EmptyBatch,

    #[error("weight file line {line}: {message}")]
    WeightFile { line: usize, message: String },

    #[error("report serialization failed: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, Error>;
