use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("register dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("site {site} out of range for a register of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("site {0} appears twice in a support")]
    DuplicateSite(usize),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not a projector (max deviation {0:e})")]
    NotProjector(f64),
    #[error("projector has rank zero")]
    ZeroRank,
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("weights do not form a probability vector: {0}")]
    BadWeights(String),
    #[error("eigensolver did not converge")]
    EigenNoConvergence,
    #[error("mixture belongs to a different eigensystem")]
    BasisMismatch,
    #[error("negative energy {0} where a non-negative spectrum is required")]
    NegativeEnergy(f64),
    #[error("graph: {0}")]
    Graph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("run did not store per-iteration diagnostics")]
    MissingDiagnostics,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

