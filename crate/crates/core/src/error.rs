use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("linear system is singular or inconsistent (residual {residual:.3e})")]
    SingularSystem { residual: f64 },

    #[error("operator is not power bounded: {0}")]
    NotPowerBounded(String),

    #[error("iterative Cesaro averaging did not converge after {terms} terms")]
    NotConverged { terms: u64 },

    #[error("no solution for {0}")]
    NoSolution(&'static str),

    #[error("solution for {what} is not unique (solution space has dimension {dim})")]
    NonUnique { what: &'static str, dim: usize },

    #[error("functionals live on different hosts")]
    HostMismatch,

    #[error("Gram matrix of the Haar state is singular")]
    SingularGram,

    #[error("functional is not an idempotent state")]
    NotIdempotent,

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("Haar classification routes disagree (centrality: {central}, null space selfadjoint: {selfadjoint})")]
    InconsistentClassification { central: bool, selfadjoint: bool },

    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),

    #[error("lattice closure exceeded {cap} elements")]
    ClosureExplosion { cap: usize },

    #[error("projection is not a good group-like projection: {0}")]
    NotGood(String),

    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("subset is not a subgroup")]
    NotASubgroup,

    #[error("invalid k = {0}")]
    InvalidK(usize),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("malformed document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
