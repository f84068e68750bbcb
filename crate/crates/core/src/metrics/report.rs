use serde::Serialize;

use super::angles::{angle_stats_with_bins, AngleHistogram};
use super::distance::{default_sample_count, sample_surface, MeshDistance};
use crate::error::Result;
use crate::mesh::HalfEdgeMesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CountPair {
    pub original: usize,
    pub remeshed: usize,
}

/// Fidelity and angle quality of a remeshed surface against its original.
/// Distances are absolute; the `_norm` variants divide by the original
/// bounding-box diagonal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QualityReport {
    pub hausdorff: f64,
    pub hausdorff_norm: f64,
    pub mean_distance: f64,
    pub mean_distance_norm: f64,
    pub theta_max_deg: f64,
    pub theta_avg_deg: f64,
    pub histogram: AngleHistogram,
    pub vertices: CountPair,
    pub faces: CountPair,
    pub samples: usize,
    pub seed: u64,
}

/// `samples` defaults to `100 × V` of the larger mesh, capped at one million.
pub fn quality_report(
    original: &HalfEdgeMesh,
    remeshed: &HalfEdgeMesh,
    samples: Option<usize>,
    seed: u64,
    bins: usize,
) -> Result<QualityReport> {
    let n = samples.unwrap_or_else(|| default_sample_count(original).max(default_sample_count(remeshed)));
    let sa = sample_surface(original, n, seed)?;
    let sb = sample_surface(remeshed, n, seed)?;
    let ab = MeshDistance::new(remeshed).directed(&sa.points);
    let ba = MeshDistance::new(original).directed(&sb.points);
    let hausdorff = ab.max.max(ba.max);
    let mean = 0.5 * (ab.mean + ba.mean);
    let diag = original.bbox_diagonal();
    let norm = |d: f64| if diag > 0.0 { d / diag } else { 0.0 };
    let angles = angle_stats_with_bins(remeshed, bins);
    Ok(QualityReport {
        hausdorff,
        hausdorff_norm: norm(hausdorff),
        mean_distance: mean,
        mean_distance_norm: norm(mean),
        theta_max_deg: angles.theta_max_deg,
        theta_avg_deg: angles.theta_avg_deg,
        histogram: angles.histogram,
        vertices: CountPair {
            original: original.n_vertices(),
            remeshed: remeshed.n_vertices(),
        },
        faces: CountPair {
            original: original.n_faces(),
            remeshed: remeshed.n_faces(),
        },
        samples: n,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{hausdorff_distance, mean_distance};
    use crate::shapes;

    #[test]
    fn report_agrees_with_standalone_metrics() {
        let a = shapes::icosphere(2);
        let b = shapes::perturbed_sphere(5, 0.05, 1);
        let r = quality_report(&a, &b, Some(4000), 11, 36).unwrap();
        assert_eq!(r.hausdorff, hausdorff_distance(&a, &b, 4000, 11).unwrap());
        assert_eq!(r.mean_distance, mean_distance(&a, &b, 4000, 11).unwrap());
        assert!((r.hausdorff_norm * a.bbox_diagonal() - r.hausdorff).abs() < 1e-15);
        assert_eq!(r.vertices, CountPair { original: 162, remeshed: b.n_vertices() });
        assert_eq!(r.histogram.total(), 3 * b.n_faces());
    }

    #[test]
    fn default_sample_count_uses_larger_mesh() {
        let a = shapes::icosahedron();
        let b = shapes::icosphere(1);
        let r = quality_report(&a, &b, None, 0, 18).unwrap();
        assert_eq!(r.samples, 4200);
        assert_eq!(r.histogram.counts.len(), 18);
    }

    #[test]
    fn json_keys() {
        let m = shapes::icosahedron();
        let r = quality_report(&m, &m, Some(100), 0, 36).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in [
            "hausdorff",
            "hausdorff_norm",
            "mean_distance",
            "mean_distance_norm",
            "theta_max_deg",
            "theta_avg_deg",
            "histogram",
            "vertices",
            "faces",
            "samples",
            "seed",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["hausdorff"].as_f64().unwrap() < 1e-12);
    }
}
