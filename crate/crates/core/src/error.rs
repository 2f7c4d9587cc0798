use thiserror::Error;

/// Errors raised by the quantifier library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QlockError {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid probability vector: {0}")]
    BadProbs(String),

    #[error("basis is not orthonormal (defect {defect:.3e})")]
    BadBasis { defect: f64 },

    #[error("value {value} outside [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("operation requires subsystem dimensions {expected:?}, state has {found:?}")]
    WrongDims {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("Bloch data does not describe a state (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotAState { min_eigenvalue: f64 },

    #[error("POVM element {index} has trace {trace}, expected 1")]
    NotUnitTrace { index: usize, trace: f64 },

    #[error("not a POVM: {0}")]
    NotPovm(String),

    #[error("preparations are not orthonormal (defect {defect:.3e})")]
    NonOrthogonalPreps { defect: f64 },

    #[error("observable spectrum is degenerate (minimum level gap {gap:.3e})")]
    DegenerateSpectrum { gap: f64 },

    #[error("first marginal is not maximally mixed (deviation {deviation:.3e})")]
    MarginalNotMixed { deviation: f64 },

    #[error("marginals are not maximally mixed (|r1| = {r1:.3e}, |r2| = {r2:.3e})")]
    MarginalsNotMixed { r1: f64, r2: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("channel does not fit the request: {0}")]
    ChannelMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QlockError>;
