use thiserror::Error;

/// Errors produced while loading graphs, building indexes, and running relaxations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph is empty after filtering")]
    EmptyGraph,

    #[error("entity index {0} is out of range")]
    InvalidEntity(usize),

    #[error("unknown entity: {0}")]
    UnknownEntity(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("stale index: built for graph {expected}, loaded against {actual}")]
    StaleIndex { expected: String, actual: String },

    #[error("index format error: {0}")]
    IndexFormat(String),

    #[error("brute-force enumeration inconclusive after {steps} steps")]
    Inconclusive { steps: u64 },

    #[error("query generation failed: {0}")]
    Generation(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
