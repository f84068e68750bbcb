use serde::Serialize;

use crate::mesh::{triangle_angles, HalfEdgeMesh};

pub const DEFAULT_BINS: usize = 36;

const EDGE_SNAP_DEG: f64 = 1e-6;

/// Fixed-width bins over [0°, 180°]; 180° itself falls in the last bin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleHistogram {
    pub bin_width_deg: f64,
    pub counts: Vec<usize>,
}

impl AngleHistogram {
    pub fn new(bins: usize) -> Self {
        assert!(bins > 0, "histogram needs at least one bin");
        Self {
            bin_width_deg: 180.0 / bins as f64,
            counts: vec![0; bins],
        }
    }

    pub fn add(&mut self, deg: f64) {
        // Snap values just below a bin edge onto it. Nine-digit file
        // coordinates move angles by ~1e-7°.
        let x = ((deg + EDGE_SNAP_DEG) / self.bin_width_deg).floor().max(0.0) as usize;
        let last = self.counts.len() - 1;
        self.counts[x.min(last)] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn bin_range(&self, k: usize) -> (f64, f64) {
        (k as f64 * self.bin_width_deg, (k + 1) as f64 * self.bin_width_deg)
    }

    /// CSV with header `bin_start_deg,bin_end_deg,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start_deg,bin_end_deg,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            let (lo, hi) = self.bin_range(k);
            out.push_str(&format!("{lo},{hi},{c}\n"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleStats {
    pub theta_max_deg: f64,
    /// 60° minus the mean absolute deviation of all angles from 60°.
    pub theta_avg_deg: f64,
    pub histogram: AngleHistogram,
    pub angle_count: usize,
    pub degenerate_faces: usize,
}

pub fn angle_stats(mesh: &HalfEdgeMesh) -> AngleStats {
    angle_stats_with_bins(mesh, DEFAULT_BINS)
}

pub fn angle_stats_with_bins(mesh: &HalfEdgeMesh, bins: usize) -> AngleStats {
    let mut histogram = AngleHistogram::new(bins);
    let mut max = 0.0f64;
    let mut deviation = 0.0;
    let mut count = 0usize;
    let mut degenerate = 0;
    for f in mesh.faces() {
        if mesh.is_face_degenerate(f) {
            degenerate += 1;
            continue;
        }
        for a in triangle_angles(mesh.face_positions(f)) {
            let deg = a.to_degrees();
            max = max.max(deg);
            deviation += (deg - 60.0).abs();
            histogram.add(deg);
            count += 1;
        }
    }
    let theta_avg_deg = if count == 0 { 0.0 } else { 60.0 - deviation / count as f64 };
    AngleStats {
        theta_max_deg: max,
        theta_avg_deg,
        histogram,
        angle_count: count,
        degenerate_faces: degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Vec3;
    use crate::shapes;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equilateral_mesh() {
        let s = angle_stats(&shapes::hex_patch(3, 1.0));
        assert_abs_diff_eq!(s.theta_max_deg, 60.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.theta_avg_deg, 60.0, epsilon = 1e-9);
        assert_eq!(s.histogram.counts[12], s.angle_count);
        assert_eq!(s.histogram.total(), 3 * 54);
    }

    #[test]
    fn right_isoceles_average() {
        let m = HalfEdgeMesh::build(vec![Vec3::zeros(), Vec3::x(), Vec3::y()], &[[0, 1, 2]]).unwrap();
        let s = angle_stats(&m);
        assert_abs_diff_eq!(s.theta_avg_deg, 60.0 - (30.0 + 15.0 + 15.0) / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.theta_max_deg, 90.0, epsilon = 1e-9);
        assert_eq!(s.histogram.counts[18], 1);
        assert_eq!(s.histogram.counts[9], 2);
    }

    #[test]
    fn degenerate_faces_are_excluded() {
        let m = HalfEdgeMesh::build(
            vec![Vec3::zeros(), Vec3::x(), 2.0 * Vec3::x(), Vec3::y()],
            &[[0, 1, 2], [1, 0, 3]],
        )
        .unwrap();
        let s = angle_stats(&m);
        assert_eq!(s.degenerate_faces, 1);
        assert_eq!(s.histogram.total(), 3);
    }

    #[test]
    fn edge_values_bin() {
        let mut h = AngleHistogram::new(36);
        h.add(180.0);
        h.add(0.0);
        h.add(59.999999999999);
        assert_eq!(h.counts[35], 1);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[12], 1);
    }

    #[test]
    fn csv_layout() {
        let h = AngleHistogram::new(18);
        let csv = h.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 19);
        assert_eq!(lines[0], "bin_start_deg,bin_end_deg,count");
        assert_eq!(lines[1], "0,10,0");
        assert_eq!(lines[18], "170,180,0");
    }

    #[test]
    fn average_never_exceeds_sixty() {
        for seed in 0..5 {
            let s = angle_stats(&shapes::perturbed_sphere(3, 0.3, seed));
            assert!(s.theta_avg_deg < 60.0);
            assert!(s.theta_max_deg > 60.0 && s.theta_max_deg <= 180.0);
        }
    }
}
