use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("channel has no Kraus operators")]
    EmptyChannel,

    /// `sum K^dag K` exceeds the identity by more than the tolerance.
    #[error("Kraus operators do not form a channel (sum K^dag K exceeds I by {excess:.3e})")]
    NotAChannel { excess: f64 },

    #[error("Kraus operator {index} is not proportional to a Pauli matrix")]
    NotPauliChannel { index: usize },

    #[error("Z-basis measurements are not supported by the building-block noise composition")]
    ZBasisUnsupported,

    #[error("site {site} out of range for {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("site {0} is not live (never prepared or already removed)")]
    SiteNotLive(usize),

    #[error("measurement basis is not orthonormal (deviation {0:.3e})")]
    NonOrthonormalBasis(f64),

    #[error("{qubits} qubits exceeds the limit of {limit}")]
    SizeLimit { qubits: usize, limit: usize },

    #[error("site {0} has already been measured")]
    AlreadyMeasured(usize),

    #[error("basis vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("sites {0:?} are still unmeasured")]
    UnmeasuredSites(Vec<usize>),

    #[error("invalid size: {0}")]
    InvalidSize(String),
}
