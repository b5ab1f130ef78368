use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex count {0} out of range (1..=64)")]
    InvalidVertexCount(usize),
    #[error("invalid vertex pair {0}-{1}")]
    InvalidPair(usize, usize),
    #[error("graph is not decomposable")]
    NotDecomposable,
    #[error("cannot {action} edge {i}-{j}: {reason}")]
    InvalidFlip { action: &'static str, i: usize, j: usize, reason: &'static str },
    #[error("{what} limited to n <= {limit}, got {n}")]
    TooLarge { what: &'static str, n: usize, limit: usize },
    #[error("invalid prior specification: {0}")]
    InvalidSpec(String),
    #[error("size mismatch: {0} vs {1} vertices")]
    SizeMismatch(usize, usize),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("empty data")]
    EmptyData,
    #[error("non-finite value in data at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {0} vs {1} variables")]
    DimensionMismatch(usize, usize),
    #[error("log multivariate gamma undefined for p={p}, x={x}")]
    DomainError { p: usize, x: f64 },
    #[error("scale matrix is numerically singular for vertex set {0}")]
    SingularScale(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("no retained samples")]
    NoSamples,
    #[error("parse error: {0}")]
    Parse(String),
}
