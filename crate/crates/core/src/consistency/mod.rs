//! Keeps smoothed vertices on the input surface: an up-sampled oriented
//! point cloud, MLS projection onto it, and the tangential smoothing pass.

mod cloud;
mod smoothing;

pub use cloud::{mls_project, mls_project_detailed, upsample_mesh, upsample_mesh_with_bandwidth, Projection, SurfaceCloud};
pub use smoothing::{centroid_weights, smooth_pass, tangent_project, tangential_update, weighted_centroid, WeightingScheme};
