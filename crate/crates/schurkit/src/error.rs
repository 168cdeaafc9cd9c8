use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partition {lambda} has more than {d} rows")]
    TooManyRows { lambda: String, d: usize },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("index {index} out of range 1..={max}")]
    OutOfRange { index: usize, max: usize },
    #[error("dense dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix is not an isometry (residual {0:.3e})")]
    NotIsometry(f64),
    #[error("density matrix is not positive semidefinite with unit trace: {0}")]
    NotDensity(String),
    #[error("negative probability entry {0}")]
    NegativeProbability(f64),
    #[error("instrument is not normalized for {lambda} (residual {residual:.3e})")]
    InvalidInstrument { lambda: String, residual: f64 },
    #[error("no consistent branch for {0}")]
    NoConsistentBranch(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported size: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
