use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live in different ambient spaces")]
    AmbientMismatch,
    #[error("degenerate or malformed symplectic form: {0}")]
    DegenerateForm(String),
    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),
    #[error("subspace is not an element of the semilattice")]
    NotInSemilattice,
    #[error("semilattice is not closed: {0}")]
    NotClosed(String),
    #[error("family is incomplete: {0}")]
    IncompleteFamily(String),
    #[error("operation not supported by this backend: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("spectral parameter must have nonzero imaginary part")]
    RealSpectralParameter,
    #[error("operator is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("no admissible direction: {0}")]
    NoDirection(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
