use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the region where a model or formula is valid.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("target weight {target} outside achievable interval [{lo}, {hi}]")]
    Range { target: f64, lo: f64, hi: f64 },

    #[error("calibration error: {0}")]
    Calibration(String),

    /// Cell precondition violated (e.g. activation cycle on an inactive neuron).
    #[error("state error: {0}")]
    State(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("walker {walker} from start {start} exceeded the {cap}-step cap")]
    CapExceeded { start: usize, walker: u64, cap: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
