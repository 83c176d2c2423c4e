use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A value lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The innovation covariance `H P Hᵀ + R` could not be inverted.
    #[error("singular innovation covariance (det = {det:e}, threshold = {threshold:e})")]
    Singular { det: f64, threshold: f64 },

    /// Fusion failed at a specific rollout step (1-based).
    #[error("fusion failed at step {step}: {source}")]
    FusionAtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    /// Normal equations of a least-squares fit are rank deficient.
    #[error("singular normal equations: {0}")]
    SingularSystem(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("insufficient history: need at least {need} points, got {got}")]
    InsufficientHistory { need: usize, got: usize },

    #[error("horizon exceeded: predictor supports {horizon} steps")]
    HorizonExceeded { horizon: usize },

    #[error("feedback requested before the first rollout step")]
    FeedbackBeforeStep,

    #[error("empty data: {0}")]
    EmptyData(String),

    #[error("unknown scenario `{0}` (valid: cv, ca, lane-change, turn)")]
    UnknownScenario(String),

    #[error("missing column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: schema error: {message}")]
    Schema {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("protocol mismatch: {0}")]
    Protocol(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem rather than by input content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
