use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("vector is not unit norm (norm {0})")]
    NotUnit(f64),
    #[error("expected a qubit (dimension 2), got dimension {0}")]
    NotQubit(usize),
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("vectors are not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("invalid partition {partition:?} of {n}")]
    InvalidPartition { partition: Vec<usize>, n: usize },
    #[error("basis is not over a qubit first factor: {0}")]
    NotQubitFirstFactor(String),
    #[error("structure violation ({observation}): {detail}")]
    StructureViolation {
        observation: &'static str,
        detail: String,
    },
    #[error("reconstructed coefficients are not Hermitian (asymmetry {0:e})")]
    Asymmetric(f64),
    #[error("repeated evaluation points")]
    RepeatedPoints,
    #[error("wrong number of evaluation points: expected {expected}, got {found}")]
    WrongPointCount { expected: usize, found: usize },
    #[error("unsupported dimensions {0}")]
    UnsupportedDims(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
