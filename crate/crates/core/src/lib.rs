//! Isotropic triangle remeshing with inter-angle guarded edits and
//! surface-constrained tangential smoothing.
//!
//! The pipeline repeatedly splits long edges, collapses short ones, flips
//! edges toward regular valence and relaxes vertices along their tangent
//! planes, projecting them back onto a point cloud sampled from the input.

pub mod config;
pub mod consistency;
pub mod driver;
pub mod error;
pub mod io;
pub mod mesh;
pub mod metrics;
pub mod ops;
pub mod shapes;
pub mod spatial;

pub use config::RemeshConfig;
pub use consistency::{SurfaceCloud, WeightingScheme};
pub use driver::{derive_target_length, remesh, IterationReport, MeshCounts, RunReport};
pub use error::{Error, Result};
pub use mesh::{EdgeId, FaceId, HalfEdgeId, HalfEdgeMesh, Vec3, VertexId};
pub use ops::{EditDecision, EditReason, PassKind, PassStats};
