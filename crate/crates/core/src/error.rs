use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("invalid bipartition: {0}")]
    InvalidCut(String),

    #[error("non-physical density matrix: {0}")]
    NonPhysical(String),

    #[error("completeness violated: |sum K^dag K - I|_F = {0:e}")]
    Completeness(f64),

    #[error("not an incoherent Kraus operator: {0}")]
    NotIncoherent(String),

    #[error("channel structure does not match class {claimed}: {reason}")]
    ClassMismatch { claimed: String, reason: String },

    #[error("infeasible sampling request: {0}")]
    InfeasibleSampling(String),

    #[error("lemma not applicable: {0}")]
    NotApplicable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("search space of {size} candidates exceeds the cap of {cap}")]
    SearchSpace { size: u128, cap: u128 },

    #[error("operator is not an invertible strictly incoherent operator: {0}")]
    NotInvertibleSio(String),

    #[error("zero samples requested")]
    ZeroSamples,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
