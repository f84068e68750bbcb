use serde::Serialize;

use super::{FaceId, HalfEdgeMesh, Vec3, VertexId};
use crate::error::{Error, Result};

/// Interior angles of a triangle in radians, matched to its vertices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleTriple(pub [f64; 3]);

impl AngleTriple {
    pub fn degrees(&self) -> [f64; 3] {
        self.0.map(f64::to_degrees)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::MIN, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

fn angle_between(u: Vec3, v: Vec3) -> f64 {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (u.dot(&v) / (nu * nv)).clamp(-1.0, 1.0).acos()
}

/// Interior angles at `p[0]`, `p[1]`, `p[2]`.
pub fn triangle_angles(p: [Vec3; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| angle_between(p[(i + 1) % 3] - p[i], p[(i + 2) % 3] - p[i]))
}

pub fn triangle_area(p: [Vec3; 3]) -> f64 {
    0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm()
}

pub(crate) fn raw_normal(p: [Vec3; 3]) -> Vec3 {
    (p[1] - p[0]).cross(&(p[2] - p[0]))
}

/// Per-face and per-vertex unit normals. Slots of deleted elements and
/// isolated vertices hold the zero vector.
#[derive(Clone, Debug)]
pub struct Normals {
    pub face: Vec<Vec3>,
    pub vertex: Vec<Vec3>,
}

impl Normals {
    pub fn vertex_normal(&self, v: VertexId) -> Option<Vec3> {
        let n = self.vertex[v.0];
        (n != Vec3::zeros()).then_some(n)
    }
}

impl HalfEdgeMesh {
    pub fn face_area(&self, f: FaceId) -> f64 {
        triangle_area(self.face_positions(f))
    }

    pub fn is_face_degenerate(&self, f: FaceId) -> bool {
        self.face_area(f) < self.degenerate_area
    }

    pub fn face_angles(&self, f: FaceId) -> Result<AngleTriple> {
        self.check_face(f)?;
        if self.is_face_degenerate(f) {
            return Err(Error::Degenerate(format!("face {} has near-zero area", f.0)));
        }
        Ok(AngleTriple(triangle_angles(self.face_positions(f))))
    }

    /// Unit normal in winding order, or zero for a degenerate face.
    pub fn face_normal(&self, f: FaceId) -> Vec3 {
        raw_normal(self.face_positions(f))
            .try_normalize(0.0)
            .unwrap_or_else(Vec3::zeros)
    }

    /// Area-weighted vertex normal; `None` for isolated vertices.
    pub fn vertex_normal(&self, v: VertexId) -> Option<Vec3> {
        let sum: Vec3 = self
            .vertex_faces(v)
            .into_iter()
            .map(|f| raw_normal(self.face_positions(f)))
            .sum();
        sum.try_normalize(0.0)
    }

    pub fn normals(&self) -> Normals {
        let mut face = vec![Vec3::zeros(); self.face_capacity()];
        let mut acc = vec![Vec3::zeros(); self.vertex_capacity()];
        for f in self.faces() {
            let raw = raw_normal(self.face_positions(f));
            face[f.0] = raw.try_normalize(0.0).unwrap_or_else(Vec3::zeros);
            for v in self.face_vertices(f) {
                acc[v.0] += raw;
            }
        }
        let vertex = acc
            .into_iter()
            .map(|n| n.try_normalize(0.0).unwrap_or_else(Vec3::zeros))
            .collect();
        Normals { face, vertex }
    }

    pub fn average_edge_length(&self) -> Result<f64> {
        let (sum, count) = self
            .edges()
            .fold((0.0, 0usize), |(s, c), e| (s + self.edge_length(e), c + 1));
        if count == 0 {
            return Err(Error::EmptyInput("mesh has no edges"));
        }
        Ok(sum / count as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use approx::assert_abs_diff_eq;
    use std::collections::HashSet;

    fn tri(p: [[f64; 3]; 3]) -> HalfEdgeMesh {
        HalfEdgeMesh::build(p.iter().map(|q| Vec3::from(*q)).collect(), &[[0, 1, 2]]).unwrap()
    }

    #[test]
    fn equilateral_angles() {
        let m = shapes::single_triangle();
        let a = m.face_angles(FaceId(0)).unwrap().degrees();
        for x in a {
            assert_abs_diff_eq!(x, 60.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn right_isoceles_angles() {
        let m = tri([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let a = m.face_angles(FaceId(0)).unwrap().degrees();
        assert_abs_diff_eq!(a[0], 90.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a[1], 45.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a[2], 45.0, epsilon = 1e-9);
    }

    #[test]
    fn flat_triangle_has_wide_angle() {
        let m = tri([[0.0, 0.0, 0.0], [4.0, 0.0, 0.0], [2.0, 0.1, 0.0]]);
        let a = m.face_angles(FaceId(0)).unwrap().degrees();
        // apex angle is 180 - 2*atan(0.1/2)
        let expected = 180.0 - 2.0 * (0.05f64).atan().to_degrees();
        assert_abs_diff_eq!(a[2], expected, epsilon = 1e-9);
        assert!(a[2] > 170.0);
    }

    #[test]
    fn degenerate_face_angles_error() {
        let m = tri([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        assert!(matches!(m.face_angles(FaceId(0)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn ccw_triangle_normal_points_up() {
        let m = shapes::single_triangle();
        assert_abs_diff_eq!(m.face_normal(FaceId(0)), Vec3::z(), epsilon = 1e-12);
    }

    #[test]
    fn planar_patch_vertex_normals() {
        let m = shapes::hex_patch(2, 1.0);
        let n = m.normals();
        for v in m.vertices() {
            assert_abs_diff_eq!(n.vertex[v.0], Vec3::z(), epsilon = 1e-12);
        }
    }

    #[test]
    fn sphere_vertex_normals_follow_position() {
        let m = shapes::icosphere(2);
        let n = m.normals();
        for v in m.vertices() {
            let radial = m.position(v).normalize();
            assert!(n.vertex[v.0].dot(&radial) > 0.99);
        }
    }

    #[test]
    fn average_edge_length_simple_cases() {
        assert_abs_diff_eq!(shapes::single_triangle().average_edge_length().unwrap(), 1.0, epsilon = 1e-12);
        let m = tri([[0.0, 0.0, 0.0], [3.0, 0.0, 0.0], [3.0, 4.0, 0.0]]);
        assert_abs_diff_eq!(m.average_edge_length().unwrap(), 4.0, epsilon = 1e-12);
        assert!(matches!(
            HalfEdgeMesh::default().average_edge_length(),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn average_edge_length_matches_edge_list_traversal() {
        let m = shapes::icosphere(2);
        let idx = m.to_indexed();
        let mut seen = HashSet::new();
        let mut sum = 0.0;
        for t in &idx.triangles {
            for k in 0..3 {
                let (a, b) = (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]));
                if seen.insert((a, b)) {
                    sum += (idx.positions[a] - idx.positions[b]).norm();
                }
            }
        }
        let brute = sum / seen.len() as f64;
        assert_abs_diff_eq!(m.average_edge_length().unwrap(), brute, epsilon = 1e-12);
    }
}
