//! Spatial indices: a kd-tree over points and a bounding-volume hierarchy
//! over triangles.

mod bvh;
mod kdtree;

pub use bvh::{closest_point_on_triangle, TriangleBvh};
pub use kdtree::KdTree;
