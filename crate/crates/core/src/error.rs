use thiserror::Error;

pub type Result<T, E = NiphError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum NiphError {
    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} points exceed the dense distance-matrix cap of {1}; use the coordinate MST path for 0-dimensional persistence")]
    TooManyPoints(usize, usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid weighting: {0}")]
    InvalidWeighting(String),

    #[error("empty distribution: {0}")]
    EmptyDistribution(String),

    #[error("resource budget `{budget}` exceeded: {required} required, limit {limit}")]
    Budget {
        budget: &'static str,
        limit: usize,
        required: usize,
    },

    #[error("probe {index} (angle {angle:.6} rad, factor {factor}) failed after {} completed probes: {source}", completed.len())]
    Probe {
        index: usize,
        angle: f64,
        factor: f64,
        completed: Vec<usize>,
        #[source]
        source: Box<NiphError>,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl NiphError {
    /// True when the failure stems from a configured resource limit rather than bad data.
    pub fn is_resource(&self) -> bool {
        match self {
            NiphError::Budget { .. } | NiphError::TooManyPoints(..) => true,
            NiphError::Probe { source, .. } => source.is_resource(),
            _ => false,
        }
    }
}
