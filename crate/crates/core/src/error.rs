use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown relationship type `{0}`")]
    UnknownRelationship(String),

    #[error("edge {from} -> {to} references missing node `{missing}`")]
    DanglingEndpoint {
        from: String,
        to: String,
        missing: String,
    },

    #[error("self-loop on node `{0}`")]
    SelfLoop(String),

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("relationship type `{0}` registered twice")]
    DuplicateRelationship(String),

    #[error("node `{0}` has an empty label")]
    EmptyLabel(String),

    #[error("edge {from} -> {to} has invalid strength {value}")]
    InvalidStrength {
        from: String,
        to: String,
        value: f64,
    },

    #[error("hop count {hops} outside decay table of length {len}")]
    HopOutOfRange { hops: usize, len: usize },

    #[error("relationship `{rel}` contains a directed cycle: {}", .witness.join(" -> "))]
    CyclicGraph { rel: String, witness: Vec<String> },

    #[error("relationship `{0}` is not transitive")]
    NonTransitiveRelationship(String),

    #[error("cannot aggregate an empty path set")]
    EmptyPathSet,

    #[error("walk count overflow from `{node}` at {hops} hops")]
    CountOverflow { node: String, hops: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("snapshots cannot be compared: {0}")]
    SnapshotMismatch(String),

    #[error("{}:{line}: {message}", .file.display())]
    Parse {
        file: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}:{line}: {message}", .file.display())]
    Schema {
        file: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
