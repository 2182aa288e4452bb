use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty multiset: the zero multi-index has no partitions")]
    EmptyMultiset,

    #[error("multi-index of total order {order} exceeds the enumeration limit {limit}")]
    OrderTooLarge { order: u32, limit: u32 },

    #[error("missing moment for index {0}")]
    MissingMoment(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vertex {vertex} out of range 1..={p}")]
    VertexOutOfRange { vertex: usize, p: usize },

    #[error("at most {max} vertices are supported, got {p}")]
    TooManyVertices { p: usize, max: usize },

    #[error("complex is not decomposable: {0}")]
    NotDecomposable(String),

    #[error("{0} is not a facet of a unique maximal clique")]
    NotUniqueClique(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("precision matrix is not symmetric at ({i}, {j})")]
    AsymmetricPrecision { i: usize, j: usize },

    #[error("non-binary index {0}")]
    NonBinaryIndex(String),

    #[error("input and output are not connected")]
    Disconnected,

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("non-positive density {value} at {point:?}")]
    NonPositiveDensity { point: Vec<f64>, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
