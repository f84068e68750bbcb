//! Split, collapse and flip. Each primitive either completes or leaves the
//! mesh untouched.

use std::collections::HashSet;

use super::geometry::raw_normal;
use super::{EdgeId, FaceId, HalfEdgeMesh, Vec3, VertexId};
use crate::error::{Error, Result};

impl HalfEdgeMesh {
    /// Inserts a vertex at `p` on edge `e`, splitting each adjacent face in two.
    pub fn split_edge_topo(&mut self, e: EdgeId, p: Vec3) -> Result<VertexId> {
        self.check_edge(e)?;
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::Degenerate("split position is not finite".into()));
        }
        let (a, b) = self.edge_vertices(e);
        let min_len = self.degenerate_area.sqrt();
        if (p - self.position(a)).norm() <= min_len || (p - self.position(b)).norm() <= min_len {
            return Err(Error::Degenerate(format!(
                "split point coincides with an endpoint of edge {}",
                e.0
            )));
        }
        let (c, d) = self.edge_opposites(e);
        let (f0, f1) = self.edge_faces(e);

        let m = self.add_vertex(p);
        match (f1, d) {
            (Some(f1), Some(d)) => {
                self.replace_faces(&[f0, f1], &[[a, m, c], [m, b, c], [b, m, d], [m, a, d]]);
            }
            _ => {
                self.replace_faces(&[f0], &[[a, m, c], [m, b, c]]);
            }
        }
        Ok(m)
    }

    /// Link condition: the endpoints' 1-rings share exactly the vertices
    /// opposite the edge.
    pub fn link_condition_holds(&self, e: EdgeId) -> bool {
        let (a, b) = self.edge_vertices(e);
        let (c, d) = self.edge_opposites(e);
        let ring_a: HashSet<VertexId> = self.neighbors(a).into_iter().collect();
        let common = self
            .neighbors(b)
            .into_iter()
            .filter(|v| ring_a.contains(v))
            .count();
        let expected = 1 + usize::from(d.is_some_and(|d| d != c));
        common == expected
    }

    /// Topological and geometric admissibility of collapsing `e` onto `p`,
    /// without the link condition (see [`Self::link_condition_holds`]).
    pub(crate) fn collapse_admissible(&self, e: EdgeId, p: Vec3) -> Result<()> {
        let (a, b) = self.edge_vertices(e);
        let (c, d) = self.edge_opposites(e);
        let interior = d.is_some();

        if interior && self.on_boundary(a) && self.on_boundary(b) {
            return Err(Error::BlockedTopology(
                "interior edge joins two boundary vertices".into(),
            ));
        }
        for o in std::iter::once(c).chain(d) {
            let min = if self.on_boundary(o) { 2 } else { 3 };
            if self.degree(o) <= min {
                return Err(Error::BlockedTopology(format!(
                    "opposite vertex {} would drop below degree {min}",
                    o.0
                )));
            }
        }
        let min_survivor = if interior { 3 } else { 2 };
        let predicted = self.degree(a) + self.degree(b) - if interior { 4 } else { 3 };
        if predicted < min_survivor {
            return Err(Error::BlockedTopology("survivor would be under-connected".into()));
        }

        for f in self.collapse_patch(a, b) {
            let old = self.face_positions(f);
            let vs = self.face_vertices(f);
            if vs.contains(&a) && vs.contains(&b) {
                continue;
            }
            let new = [0, 1, 2].map(|k| if vs[k] == a || vs[k] == b { p } else { old[k] });
            let n_new = raw_normal(new);
            if 0.5 * n_new.norm() < self.degenerate_area {
                return Err(Error::BlockedGeometry(format!("face {} would degenerate", f.0)));
            }
            if raw_normal(old).dot(&n_new) < 0.0 {
                return Err(Error::BlockedGeometry(format!("face {} would fold over", f.0)));
            }
        }
        Ok(())
    }

    fn collapse_patch(&self, a: VertexId, b: VertexId) -> Vec<FaceId> {
        let mut patch = self.vertex_faces(a);
        for f in self.vertex_faces(b) {
            if !patch.contains(&f) {
                patch.push(f);
            }
        }
        patch
    }

    /// Merges the endpoints of `e` into the edge's origin vertex, placed at
    /// `p`. The other endpoint is deleted.
    pub fn collapse_edge_topo(&mut self, e: EdgeId, p: Vec3) -> Result<VertexId> {
        self.check_edge(e)?;
        if !self.link_condition_holds(e) {
            return Err(Error::BlockedTopology(format!("link condition fails on edge {}", e.0)));
        }
        self.collapse_admissible(e, p)?;

        let (a, b) = self.edge_vertices(e);
        let patch = self.collapse_patch(a, b);
        let mut old = Vec::with_capacity(patch.len());
        let mut new = Vec::with_capacity(patch.len());
        for f in patch {
            let vs = self.face_vertices(f);
            old.push(f);
            if vs.contains(&a) && vs.contains(&b) {
                continue;
            }
            new.push(vs.map(|v| if v == b { a } else { v }));
        }
        self.replace_faces(&old, &new);
        self.delete_vertex(b);
        self.set_position(a, p);
        Ok(a)
    }

    /// Replaces interior edge `e` by the diagonal joining its opposite vertices.
    pub fn flip_edge_topo(&mut self, e: EdgeId) -> Result<()> {
        self.check_edge(e)?;
        let (a, b) = self.edge_vertices(e);
        let (c, d) = self.edge_opposites(e);
        let (f0, f1) = self.edge_faces(e);
        let (Some(d), Some(f1)) = (d, f1) else {
            return Err(Error::BlockedTopology(format!("edge {} is on the boundary", e.0)));
        };
        if c == d || self.find_edge(c, d).is_some() {
            return Err(Error::BlockedTopology(format!(
                "opposite vertices of edge {} are already adjacent",
                e.0
            )));
        }
        self.replace_faces(&[f0, f1], &[[c, a, d], [d, b, c]]);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn counts(m: &HalfEdgeMesh) -> (usize, usize, usize) {
        (m.n_vertices(), m.n_edges(), m.n_faces())
    }

    fn strip() -> HalfEdgeMesh {
        let p = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        HalfEdgeMesh::build(p, &[[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    fn interior_edge(m: &HalfEdgeMesh) -> EdgeId {
        m.edges().find(|&e| !m.is_boundary_edge(e).unwrap()).unwrap()
    }

    fn audit(m: &HalfEdgeMesh) {
        let r = m.validate();
        assert!(r.is_manifold, "{r:?}");
    }

    #[test]
    fn split_interior_edge_counts() {
        let mut m = strip();
        let e = interior_edge(&m);
        let (a, b) = m.edge_vertices(e);
        let mid = 0.5 * (m.position(a) + m.position(b));
        let v = m.split_edge_topo(e, mid).unwrap();
        assert_eq!(counts(&m), (5, 8, 4));
        assert_eq!(m.vertex_degree(v).unwrap(), 4);
        audit(&m);
    }

    #[test]
    fn split_boundary_edge_counts() {
        let mut m = shapes::single_triangle();
        let e = m.edges().next().unwrap();
        let (a, b) = m.edge_vertices(e);
        m.split_edge_topo(e, 0.5 * (m.position(a) + m.position(b))).unwrap();
        assert_eq!(counts(&m), (4, 5, 2));
        audit(&m);
    }

    #[test]
    fn split_keeps_euler_on_closed_mesh() {
        let mut m = shapes::tetrahedron();
        for i in 0..6 {
            let e = m.edges().nth(i % m.n_edges()).unwrap();
            let (a, b) = m.edge_vertices(e);
            m.split_edge_topo(e, 0.5 * (m.position(a) + m.position(b))).unwrap();
            assert_eq!(m.euler_characteristic(), 2);
            audit(&m);
        }
    }

    #[test]
    fn split_at_endpoint_is_rejected_without_mutation() {
        let mut m = strip();
        let e = interior_edge(&m);
        let (a, _) = m.edge_vertices(e);
        let before = counts(&m);
        let p = m.position(a);
        assert!(matches!(m.split_edge_topo(e, p), Err(Error::Degenerate(_))));
        assert_eq!(counts(&m), before);
    }

    #[test]
    fn collapse_degree_formula_on_octahedron() {
        let mut m = shapes::octahedron();
        let e = m.edges().next().unwrap();
        let (a, b) = m.edge_vertices(e);
        let predicted = m.degree(a) + m.degree(b) - 4;
        let mid = 0.5 * (m.position(a) + m.position(b));
        let s = m.collapse_edge_topo(e, mid).unwrap();
        assert_eq!(predicted, 4);
        assert_eq!(m.vertex_degree(s).unwrap(), predicted);
        assert_eq!(counts(&m), (5, 9, 6));
        assert_eq!(m.euler_characteristic(), 2);
        audit(&m);

        // the same result built from scratch
        let idx = m.to_indexed();
        let rebuilt = HalfEdgeMesh::build(idx.positions, &idx.triangles).unwrap();
        let s_new = VertexId(idx.vertex_map[s.0].unwrap());
        assert_eq!(rebuilt.vertex_degree(s_new).unwrap(), 4);
    }

    #[test]
    fn collapse_five_six_gives_seven() {
        let (mut m, e) = shapes::degree_collapse_fixture();
        let (a, b) = m.edge_vertices(e);
        assert_eq!([m.degree(a), m.degree(b)], [5, 6]);
        let p = 0.5 * (m.position(a) + m.position(b));
        let s = m.collapse_edge_topo(e, p).unwrap();
        assert_eq!(m.vertex_degree(s).unwrap(), 7);
        audit(&m);
    }

    #[test]
    fn collapse_with_three_common_neighbours_blocked() {
        // after one collapse the octahedron has an edge whose endpoints share
        // three neighbours but only two opposite vertices
        let mut m = shapes::octahedron();
        let e = m.edges().next().unwrap();
        let (a, b) = m.edge_vertices(e);
        let p = 0.5 * (m.position(a) + m.position(b));
        m.collapse_edge_topo(e, p).unwrap();
        let blocked = m.edges().find(|&e| !m.link_condition_holds(e)).unwrap();
        let before = counts(&m);
        let (a, b) = m.edge_vertices(blocked);
        let p = 0.5 * (m.position(a) + m.position(b));
        assert!(matches!(
            m.collapse_edge_topo(blocked, p),
            Err(Error::BlockedTopology(_))
        ));
        assert_eq!(counts(&m), before);
        audit(&m);
    }

    #[test]
    fn tetrahedron_collapse_blocked() {
        let mut m = shapes::tetrahedron();
        let e = m.edges().next().unwrap();
        let (a, b) = m.edge_vertices(e);
        let p = 0.5 * (m.position(a) + m.position(b));
        assert!(matches!(m.collapse_edge_topo(e, p), Err(Error::BlockedTopology(_))));
        assert_eq!(counts(&m), (4, 6, 4));
    }

    #[test]
    fn collapse_fold_is_blocked() {
        let mut m = shapes::hex_patch(2, 1.0);
        let centre = m.vertices().find(|&v| m.position(v).norm() < 1e-9).unwrap();
        let n = m.neighbors(centre)[0];
        let e = m.find_edge(centre, n).unwrap();
        // far outside the ring: every face would flip
        let p = m.position(n) * 10.0;
        let before = counts(&m);
        assert!(matches!(m.collapse_edge_topo(e, p), Err(Error::BlockedGeometry(_))));
        assert_eq!(counts(&m), before);
    }

    #[test]
    fn split_then_collapse_restores_counts() {
        let mut m = shapes::icosphere(1);
        let before = counts(&m);
        let e = m.edges().nth(7).unwrap();
        let (a, b) = m.edge_vertices(e);
        let pa = m.position(a);
        let mid = 0.5 * (pa + m.position(b));
        let v = m.split_edge_topo(e, mid).unwrap();
        let child = m.find_edge(a, v).unwrap();
        // keep `a` in place: collapse toward its original position
        m.collapse_edge_topo(child, pa).unwrap();
        assert_eq!(counts(&m), before);
        audit(&m);
    }

    #[test]
    fn flip_square_diagonal() {
        let mut m = strip();
        let e = interior_edge(&m);
        let (a, b) = m.edge_vertices(e);
        let (c, d) = m.edge_opposites(e);
        let d = d.unwrap();
        let deg = |m: &HalfEdgeMesh| [a, b, c, d].map(|v| m.degree(v));
        assert_eq!(deg(&m), [3, 3, 2, 2]);
        let before = counts(&m);
        m.flip_edge_topo(e).unwrap();
        assert_eq!(deg(&m), [2, 2, 3, 3]);
        assert_eq!(counts(&m), before);
        assert!(m.find_edge(c, d).is_some());
        assert!(m.find_edge(a, b).is_none());
        audit(&m);
    }

    #[test]
    fn flip_blocked_cases() {
        let mut t = shapes::tetrahedron();
        let e = t.edges().next().unwrap();
        assert!(matches!(t.flip_edge_topo(e), Err(Error::BlockedTopology(_))));
        let mut s = shapes::single_triangle();
        let e = s.edges().next().unwrap();
        assert!(matches!(s.flip_edge_topo(e), Err(Error::BlockedTopology(_))));
        assert_eq!(counts(&t), (4, 6, 4));
    }
}
