use thiserror::Error;

use crate::mesh::{EdgeKey, MeshValidationReport};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input at {location}: {message}")]
    Malformed { location: String, message: String },

    #[error("non-manifold mesh ({} non-manifold edges)", .0.non_manifold_edges.len())]
    NonManifold(Box<MeshValidationReport>),

    #[error("inconsistent orientation: directed edge {0:?} appears twice")]
    Orientation(EdgeKey),

    #[error("vertex index {index} out of range ({count} vertices)")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("triangle {0} repeats a vertex")]
    RepeatedVertex(usize),

    #[error("stale handle: {0}")]
    StaleHandle(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("edit blocked by topology: {0}")]
    BlockedTopology(String),

    #[error("edit blocked by geometry: {0}")]
    BlockedGeometry(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("isolated vertex {0}")]
    IsolatedVertex(usize),

    #[error("point is outside the surface domain (nearest sample at {distance})")]
    OutOfDomain { distance: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn malformed(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Malformed {
            location: location.into(),
            message: message.into(),
        }
    }
}
