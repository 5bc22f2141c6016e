use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation of U†U from identity {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is singular")]
    Singular,

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid device: {0}")]
    Device(String),

    #[error("reconstruction failed: best RMS visibility residual {residual:.3e}")]
    ReconstructionFailed { residual: f64 },
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::Dimension { expected: expected.to_string(), found: found.to_string() }
    }
}
