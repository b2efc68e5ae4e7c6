use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorridorError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed grid header: {0}")]
    MalformedHeader(String),
    #[error("elevation count mismatch: expected {expected}, found {found}")]
    ElevationCountMismatch { expected: usize, found: usize },
    #[error("non-finite or unparsable elevation value {0:?}")]
    BadElevation(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("index ({0}, {1}) outside grid")]
    OutOfBounds(i64, i64),
    #[error("point ({0}, {1}) outside grid extent")]
    OutsideExtent(f64, f64),
    #[error("negative effective edge weight {0}")]
    NegativeWeight(f64),
    #[error("paths do not share endpoints")]
    EndpointMismatch,
    #[error("empty path")]
    EmptyPath,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("empty record set")]
    EmptyRecords,
}

pub type Result<T> = std::result::Result<T, CorridorError>;
