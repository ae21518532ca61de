use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("operator is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("basis is not trace-orthogonal (defect {0:e})")]
    NonOrthogonalBasis(f64),

    #[error("negative rate {0}")]
    NegativeRate(f64),

    #[error("axis must be a unit vector, got norm {0}")]
    NonUnitAxis(f64),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("positivity violated at t = {t}: smallest eigenvalue {min_eigenvalue:e}")]
    PsdViolation { t: f64, min_eigenvalue: f64 },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),
}

impl Error {
    /// Time stamp of a runtime integration abort, if this is one.
    pub fn abort_time(&self) -> Option<f64> {
        match self {
            Error::IntegrationFailure { t, .. } | Error::PsdViolation { t, .. } => Some(*t),
            _ => None,
        }
    }
}
