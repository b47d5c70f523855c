use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("metric is singular or not positive definite (pivot {pivot:.3e} at row {row})")]
    SingularMetric { row: usize, pivot: f64 },
    #[error("incompatible indices: {0}")]
    IncompatibleIndices(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point outside chart: {0}")]
    PointOutsideChart(String),
    #[error("metric is not positive definite at the point (min eigen-pivot {0:.3e})")]
    NonPositiveDefinite(f64),
    #[error("syntax error at line {line}, column {col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("dimension error: {0}")]
    DimensionError(String),
    #[error("diagonal entry g[{0},{0}] is not real-valued")]
    NonHermitianEntry(usize),
    #[error("evaluation error at line {line}, column {col}: {msg}")]
    EvaluationError { line: usize, col: usize, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("zero vector")]
    ZeroVector,
    #[error("consistency failure in {what}: residual {residual:.3e} exceeds {tol:.1e}")]
    ConsistencyFailure { what: String, residual: f64, tol: f64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("configuration error: {0}")]
    ConfigError(String),
    #[error("io error: {0}")]
    IoError(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::IoError(e.to_string())
    }
}
