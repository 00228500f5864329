use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid tridiagonal operator: {0}")]
    InvalidTridiagonal(String),

    #[error("eigensolver failed to converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("imaginary time must be nonnegative and finite, got {0}")]
    NegativeTau(f64),

    #[error("vector {index} is linearly dependent on its predecessors")]
    LinearDependence { index: usize },

    #[error("vectors have inconsistent lengths: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("density matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("density matrix has non-negligible imaginary part ({0:e}); only real states are supported")]
    ComplexEntries(f64),

    #[error("matrix with {0} entries is not of size 4^L")]
    NotPowerOfFour(usize),

    #[error("{what} exceeds size guard: {got} > {limit}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("state sector mismatch: expected {expected}, got {got}")]
    SectorMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dephasing probability must lie in [0, 1/2), got {0}")]
    ProbabilityDomain(f64),

    #[error("{0}")]
    ModelDomain(String),

    #[error("argument outside convergence domain: {0}")]
    Domain(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("starting vector must have unit norm, got {0}")]
    NonUnitStart(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
