use log::debug;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{HalfEdgeMesh, Vec3};
use crate::spatial::KdTree;

const SEARCH_RADIUS: f64 = 3.0;
const DOMAIN_RADIUS: f64 = 10.0;
const MAX_ITERATIONS: usize = 10;
const STOP_FRACTION: f64 = 1e-3;
const MIN_NORMAL_AGGREGATE: f64 = 1e-6;

/// Oriented sample set describing the input surface. Immutable once built.
#[derive(Clone, Debug)]
pub struct SurfaceCloud {
    tree: KdTree,
    normals: Vec<Vec3>,
    bandwidth: f64,
    skipped_faces: usize,
}

impl SurfaceCloud {
    /// Builds a cloud from raw samples. Normals are normalized; samples with
    /// a zero normal are rejected.
    pub fn from_points(points: Vec<Vec3>, normals: Vec<Vec3>, bandwidth: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("point cloud has no samples"));
        }
        if points.len() != normals.len() {
            return Err(Error::InvalidConfig("point and normal counts differ".into()));
        }
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidConfig("bandwidth must be positive".into()));
        }
        let normals = normals
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                n.try_normalize(0.0)
                    .ok_or_else(|| Error::Degenerate(format!("sample {i} has a zero normal")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            tree: KdTree::new(points),
            normals,
            bandwidth,
            skipped_faces: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        self.tree.points()
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Degenerate input faces that contributed no samples.
    pub fn skipped_faces(&self) -> usize {
        self.skipped_faces
    }

    pub fn nearest(&self, q: Vec3) -> Option<(usize, f64)> {
        self.tree.nearest(q)
    }

    pub fn within_radius(&self, q: Vec3, r: f64) -> Vec<(usize, f64)> {
        self.tree.within_radius(q, r)
    }
}

/// The seven face samples: centroid, midpoints toward each corner, and the
/// centers between consecutive midpoints.
fn seven_points(p: [Vec3; 3]) -> [Vec3; 7] {
    let c = (p[0] + p[1] + p[2]) / 3.0;
    let m = p.map(|v| 0.5 * (v + c));
    [
        c,
        m[0],
        m[1],
        m[2],
        0.5 * (m[0] + m[1]),
        0.5 * (m[1] + m[2]),
        0.5 * (m[2] + m[0]),
    ]
}

/// Up-samples `mesh` with bandwidth `0.5 ×` its average edge length.
pub fn upsample_mesh(mesh: &HalfEdgeMesh) -> Result<SurfaceCloud> {
    let h = 0.5 * mesh.average_edge_length()?;
    upsample_mesh_with_bandwidth(mesh, h)
}

pub fn upsample_mesh_with_bandwidth(mesh: &HalfEdgeMesh, bandwidth: f64) -> Result<SurfaceCloud> {
    let normals = mesh.normals();
    let mut points = Vec::new();
    let mut point_normals = Vec::new();
    for v in mesh.vertices() {
        if let Some(n) = normals.vertex_normal(v) {
            points.push(mesh.position(v));
            point_normals.push(n);
        }
    }
    let base = points.len();
    let mut skipped = 0;
    for f in mesh.faces() {
        if mesh.is_face_degenerate(f) {
            skipped += 1;
            continue;
        }
        for p in seven_points(mesh.face_positions(f)) {
            points.push(p);
            point_normals.push(normals.face[f.0]);
        }
    }
    if skipped > 0 {
        debug!("up-sampling skipped {skipped} degenerate faces");
    }

    let preliminary = SurfaceCloud::from_points(points, point_normals, bandwidth)?;
    let adjusted: Vec<Vec3> = preliminary.points()[base..]
        .par_iter()
        .map(|&p| mls_project(p, &preliminary).unwrap_or(p))
        .collect();
    let mut points = preliminary.points()[..base].to_vec();
    points.extend(adjusted);
    let mut cloud = SurfaceCloud::from_points(points, preliminary.normals, bandwidth)?;
    cloud.skipped_faces = skipped;
    Ok(cloud)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    pub position: Vec3,
    pub iterations: usize,
    /// The local normal aggregate vanished and the nearest sample was used.
    pub fallback: bool,
}

pub fn mls_project(q: Vec3, cloud: &SurfaceCloud) -> Result<Vec3> {
    mls_project_detailed(q, cloud).map(|p| p.position)
}

/// Iterated weighted-plane projection with Gaussian weights `exp(−d²/h²)`.
pub fn mls_project_detailed(q: Vec3, cloud: &SurfaceCloud) -> Result<Projection> {
    let h = cloud.bandwidth;
    let (nearest, dist) = cloud
        .nearest(q)
        .ok_or(Error::EmptyInput("point cloud has no samples"))?;
    if dist > DOMAIN_RADIUS * h {
        return Err(Error::OutOfDomain { distance: dist });
    }
    let fallback = |iterations| Projection {
        position: cloud.points()[nearest],
        iterations,
        fallback: true,
    };

    let mut p = q;
    for it in 1..=MAX_ITERATIONS {
        let hood = cloud.within_radius(p, SEARCH_RADIUS * h);
        if hood.is_empty() {
            let distance = cloud.nearest(p).map_or(f64::INFINITY, |n| n.1);
            return Err(Error::OutOfDomain { distance });
        }
        let mut wsum = 0.0;
        let mut c = Vec3::zeros();
        let mut n = Vec3::zeros();
        for &(i, d2) in &hood {
            let w = (-d2 / (h * h)).exp();
            wsum += w;
            c += w * cloud.points()[i];
            n += w * cloud.normals[i];
        }
        if wsum <= 0.0 || (n / wsum).norm() < MIN_NORMAL_AGGREGATE {
            return Ok(fallback(it));
        }
        let c = c / wsum;
        let n = n.normalize();
        let step = (p - c).dot(&n) * n;
        p -= step;
        if step.norm() < STOP_FRACTION * h {
            return Ok(Projection {
                position: p,
                iterations: it,
                fallback: false,
            });
        }
    }
    Ok(Projection {
        position: p,
        iterations: MAX_ITERATIONS,
        fallback: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use proptest::prelude::*;

    fn plane_cloud(n: usize, spacing: f64) -> SurfaceCloud {
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                pts.push(Vec3::new(i as f64 * spacing, j as f64 * spacing, 0.0));
            }
        }
        let normals = vec![Vec3::z(); pts.len()];
        SurfaceCloud::from_points(pts, normals, spacing).unwrap()
    }

    fn sphere_cloud() -> &'static SurfaceCloud {
        static CLOUD: std::sync::OnceLock<SurfaceCloud> = std::sync::OnceLock::new();
        CLOUD.get_or_init(|| {
            let m = shapes::geodesic_sphere(16);
            let pts: Vec<Vec3> = m.vertices().map(|v| m.position(v)).collect();
            let normals = pts.iter().map(|p| p.normalize()).collect();
            SurfaceCloud::from_points(pts, normals, 0.5 * m.average_edge_length().unwrap()).unwrap()
        })
    }

    #[test]
    fn single_triangle_has_ten_samples() {
        let c = upsample_mesh(&shapes::single_triangle()).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c.skipped_faces(), 0);
    }

    #[test]
    fn sample_count_matches_enumeration() {
        for m in [shapes::icosahedron(), shapes::icosphere(1), shapes::torus(10, 6, 2.0, 0.7)] {
            let live_vertices = m.vertices().filter(|&v| !m.is_isolated(v)).count();
            let good_faces = m.faces().filter(|&f| !m.is_face_degenerate(f)).count();
            assert_eq!(upsample_mesh(&m).unwrap().len(), live_vertices + 7 * good_faces);
        }
        assert_eq!(upsample_mesh(&shapes::icosahedron()).unwrap().len(), 12 + 7 * 20);
        assert_eq!(upsample_mesh(&shapes::icosphere(1)).unwrap().len(), 42 + 7 * 80);
    }

    #[test]
    fn seven_points_are_the_described_construction() {
        let p = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0), Vec3::new(0.0, 3.0, 0.0)];
        let s = seven_points(p);
        assert_eq!(s[0], Vec3::new(1.0, 1.0, 0.0));
        assert_eq!(s[1], Vec3::new(0.5, 0.5, 0.0));
        assert_eq!(s[2], Vec3::new(2.0, 0.5, 0.0));
        assert_eq!(s[4], Vec3::new(1.25, 0.5, 0.0));
    }

    #[test]
    fn planar_samples_stay_in_plane() {
        let m = shapes::hex_patch(3, 1.0);
        let c = upsample_mesh(&m).unwrap();
        for (p, n) in c.points().iter().zip(c.normals()) {
            assert!(p.z.abs() < 1e-12);
            assert!((n.norm() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn unit_normals_on_curved_input() {
        let c = upsample_mesh(&shapes::perturbed_sphere(3, 0.1, 2)).unwrap();
        assert!(c.normals().iter().all(|n| (n.norm() - 1.0).abs() < 1e-6));
    }

    #[test]
    fn plane_fixpoint_and_projection() {
        let c = plane_cloud(20, 0.1);
        let q = Vec3::new(0.93, 1.07, 0.0);
        assert!((mls_project(q, &c).unwrap() - q).norm() < 1e-9);
        let r = mls_project(Vec3::new(0.93, 1.07, 0.05), &c).unwrap();
        assert!(r.z.abs() < 1e-6);
        assert!((r.xy() - q.xy()).norm() < 1e-9);
    }

    #[test]
    fn far_query_is_out_of_domain() {
        let c = plane_cloud(5, 0.1);
        assert!(matches!(
            mls_project(Vec3::new(0.2, 0.2, 5.0), &c),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn opposing_normals_fall_back_to_nearest() {
        let pts = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 0.0)];
        let c = SurfaceCloud::from_points(pts, vec![Vec3::z(), -Vec3::z()], 1.0).unwrap();
        let r = mls_project_detailed(Vec3::new(0.1, 0.0, 0.3), &c).unwrap();
        assert!(r.fallback);
        assert_eq!(r.position, Vec3::zeros());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sphere_projection_matches_radial(theta in 0.1f64..3.0, phi in 0.0f64..6.0, r in 0.95f64..1.05) {
            let c = sphere_cloud();
            let q = r * Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            let p = mls_project(q, c).unwrap();
            // oracle: analytic radial projection onto the unit sphere
            let radial = q.normalize();
            prop_assert!((p.norm() - 1.0).abs() < 0.01);
            prop_assert!((p - radial).norm() < 0.01);
        }
    }
}
