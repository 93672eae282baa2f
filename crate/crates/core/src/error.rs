use thiserror::Error;

/// Errors produced by the simulation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rotation axis is not a unit vector (norm {0})")]
    NonUnitAxis(f64),

    #[error("state is not normalized (norm {0})")]
    Unnormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("database size must be at least 2 (got {0})")]
    DatabaseTooSmall(u64),

    #[error("time {t} outside the supported domain [0, {max}]")]
    TimeOutOfDomain { t: f64, max: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("step count {required} exceeds cap {cap}")]
    StepCapExceeded { required: f64, cap: u64 },

    #[error("graph has a repeated edge ({0}, {1})")]
    Multigraph(usize, usize),

    #[error("graph has a self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("edge coloring failed: {0}")]
    Coloring(String),

    #[error("Hamiltonian support does not match graph: {0}")]
    SupportMismatch(String),

    #[error("majority vote needs an odd number of runs (got {0})")]
    EvenRuns(u64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
