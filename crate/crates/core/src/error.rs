use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid timestep: {0} s (expected 0 < dt <= 1)")]
    InvalidTimestep(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("path too coarse: {0} samples (need at least 16)")]
    PathTooCoarse(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("degenerate geometry: vessels coincide")]
    DegenerateGeometry,
    #[error("no field needed: encounter is clear")]
    NoFieldNeeded,
    #[error("undefined direction: zero force")]
    UndefinedDirection,
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("empty log")]
    EmptyLog,
    #[error("invariant violated at record {record}: {what}")]
    InvariantViolation { record: usize, what: String },
}
