//! Surface distances, inter-angle statistics and the combined quality report.

mod angles;
mod distance;
mod report;

pub use angles::{angle_stats, angle_stats_with_bins, AngleHistogram, AngleStats, DEFAULT_BINS};
pub use distance::{
    default_sample_count, hausdorff_distance, mean_distance, point_to_mesh_distance, sample_surface, DirectedDistance,
    MeshDistance, SurfaceSamples,
};
pub use report::{quality_report, CountPair, QualityReport};
