//! Manifold triangle meshes with half-edge adjacency.
//!
//! Half-edges live in face slots: face `f` owns half-edges `3f`, `3f + 1` and
//! `3f + 2`, so `next`, `prev` and `face` are index arithmetic and only the
//! origin vertex and the twin link are stored. A half-edge without a twin lies
//! on the mesh boundary.
//!
//! Deleted vertices and faces are tombstoned and recycled through free-lists.
//! Ids stay stable while a pass runs; [`HalfEdgeMesh::to_indexed`] compacts.

mod geometry;
mod topology;
mod validate;

use std::collections::HashMap;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};

pub use geometry::{triangle_angles, triangle_area, AngleTriple, Normals};
pub(crate) use geometry::raw_normal;
pub use validate::MeshValidationReport;

pub type Vec3 = Vector3<f64>;

/// Faces with area below this fraction of the squared bounding-box diagonal
/// are degenerate.
pub const DEGENERACY_RATIO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FaceId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HalfEdgeId(pub usize);

/// An undirected edge, named by its canonical half-edge: the lower-indexed
/// half of a twin pair, or the only half-edge of a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeId(pub usize);

/// Unordered vertex pair, smaller index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeKey(pub usize, pub usize);

impl EdgeKey {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            EdgeKey(a, b)
        } else {
            EdgeKey(b, a)
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct HalfEdge {
    origin: usize,
    twin: Option<usize>,
}

/// Compacted vertex/triangle buffers, ready for file output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IndexedMesh {
    pub positions: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    /// Old vertex id -> new index, `None` for deleted slots.
    pub vertex_map: Vec<Option<usize>>,
}

#[derive(Clone, Debug, Default)]
pub struct HalfEdgeMesh {
    positions: Vec<Vec3>,
    vertex_out: Vec<Option<usize>>,
    vertex_live: Vec<bool>,
    half_edges: Vec<HalfEdge>,
    face_live: Vec<bool>,
    free_vertices: Vec<usize>,
    free_faces: Vec<usize>,
    live_vertices: usize,
    live_faces: usize,
    degenerate_area: f64,
}

#[inline]
fn next_of(h: usize) -> usize {
    h - h % 3 + (h + 1) % 3
}

#[inline]
fn prev_of(h: usize) -> usize {
    h - h % 3 + (h + 2) % 3
}

impl HalfEdgeMesh {
    /// Builds connectivity from an indexed triangle list. Winding must be
    /// consistent and every edge may border at most two triangles.
    pub fn build(positions: Vec<Vec3>, triangles: &[[usize; 3]]) -> Result<Self> {
        let n = positions.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, count: n });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::RepeatedVertex(t));
            }
        }

        let mut undirected: HashMap<EdgeKey, usize> = HashMap::new();
        for tri in triangles {
            for k in 0..3 {
                *undirected.entry(EdgeKey::new(tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut overfull: Vec<EdgeKey> = undirected
            .iter()
            .filter(|(_, &c)| c > 2)
            .map(|(&k, _)| k)
            .collect();
        if !overfull.is_empty() {
            overfull.sort();
            let report = MeshValidationReport {
                is_manifold: false,
                non_manifold_edges: overfull,
                ..Default::default()
            };
            return Err(Error::NonManifold(Box::new(report)));
        }

        let mut half_edges = Vec::with_capacity(triangles.len() * 3);
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 3);
        for tri in triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let h = half_edges.len();
                if directed.insert((a, b), h).is_some() {
                    return Err(Error::Orientation(EdgeKey(a, b)));
                }
                half_edges.push(HalfEdge { origin: a, twin: None });
            }
        }
        for (&(a, b), &h) in &directed {
            if let Some(&t) = directed.get(&(b, a)) {
                half_edges[h].twin = Some(t);
            }
        }

        let mut mesh = HalfEdgeMesh {
            vertex_out: vec![None; n],
            vertex_live: vec![true; n],
            face_live: vec![true; triangles.len()],
            live_vertices: n,
            live_faces: triangles.len(),
            positions,
            half_edges,
            ..Default::default()
        };
        for h in 0..mesh.half_edges.len() {
            let v = mesh.half_edges[h].origin;
            if mesh.vertex_out[v].is_none() {
                mesh.vertex_out[v] = Some(h);
            }
        }
        for v in 0..n {
            mesh.rewind_vertex_out(v);
        }

        let mut out_count = vec![0usize; n];
        for he in &mesh.half_edges {
            out_count[he.origin] += 1;
        }
        let mut split_fans: Vec<usize> = (0..n)
            .filter(|&v| mesh.outgoing_raw(v).len() != out_count[v])
            .collect();
        if !split_fans.is_empty() {
            split_fans.sort();
            let report = MeshValidationReport {
                is_manifold: false,
                non_manifold_vertices: split_fans,
                ..Default::default()
            };
            return Err(Error::NonManifold(Box::new(report)));
        }

        mesh.refresh_degeneracy_threshold();
        Ok(mesh)
    }

    /// Recomputes the degenerate-area threshold from the current bounding box.
    pub fn refresh_degeneracy_threshold(&mut self) {
        let d = self.bbox_diagonal();
        self.degenerate_area = DEGENERACY_RATIO * d * d;
    }

    pub fn degenerate_area(&self) -> f64 {
        self.degenerate_area
    }

    pub fn bbox(&self) -> Option<(Vec3, Vec3)> {
        let mut it = self.vertices().map(|v| self.positions[v.0]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| (lo.inf(&p), hi.sup(&p))))
    }

    pub fn bbox_diagonal(&self) -> f64 {
        self.bbox().map_or(0.0, |(lo, hi)| (hi - lo).norm())
    }

    // ---- counts and iteration ----------------------------------------

    pub fn n_vertices(&self) -> usize {
        self.live_vertices
    }

    pub fn n_faces(&self) -> usize {
        self.live_faces
    }

    pub fn n_edges(&self) -> usize {
        self.edges().count()
    }

    pub fn is_empty(&self) -> bool {
        self.live_faces == 0 && self.live_vertices == 0
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.n_faces() as i64
    }

    pub fn vertex_capacity(&self) -> usize {
        self.positions.len()
    }

    pub fn half_edge_capacity(&self) -> usize {
        self.half_edges.len()
    }

    pub fn face_capacity(&self) -> usize {
        self.face_live.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.positions.len())
            .filter(|&v| self.vertex_live[v])
            .map(VertexId)
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.face_live.len())
            .filter(|&f| self.face_live[f])
            .map(FaceId)
    }

    /// Live edges in ascending id order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.half_edges.len())
            .filter(|&h| self.face_live[h / 3])
            .filter(|&h| self.half_edges[h].twin.is_none_or(|t| h < t))
            .map(EdgeId)
    }

    pub fn is_vertex_live(&self, v: VertexId) -> bool {
        v.0 < self.vertex_live.len() && self.vertex_live[v.0]
    }

    pub fn is_face_live(&self, f: FaceId) -> bool {
        f.0 < self.face_live.len() && self.face_live[f.0]
    }

    pub fn is_edge_live(&self, e: EdgeId) -> bool {
        e.0 < self.half_edges.len()
            && self.face_live[e.0 / 3]
            && self.half_edges[e.0].twin.is_none_or(|t| e.0 < t)
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.is_vertex_live(v) {
            Ok(())
        } else {
            Err(Error::StaleHandle(format!("vertex {}", v.0)))
        }
    }

    pub(crate) fn check_edge(&self, e: EdgeId) -> Result<()> {
        if self.is_edge_live(e) {
            Ok(())
        } else {
            Err(Error::StaleHandle(format!("edge {}", e.0)))
        }
    }

    pub(crate) fn check_face(&self, f: FaceId) -> Result<()> {
        if self.is_face_live(f) {
            Ok(())
        } else {
            Err(Error::StaleHandle(format!("face {}", f.0)))
        }
    }

    // ---- positions ----------------------------------------------------

    pub fn position(&self, v: VertexId) -> Vec3 {
        self.positions[v.0]
    }

    pub fn set_position(&mut self, v: VertexId, p: Vec3) {
        self.positions[v.0] = p;
    }

    // ---- half-edge navigation ----------------------------------------

    pub fn origin(&self, h: HalfEdgeId) -> VertexId {
        VertexId(self.half_edges[h.0].origin)
    }

    pub fn dest(&self, h: HalfEdgeId) -> VertexId {
        VertexId(self.half_edges[next_of(h.0)].origin)
    }

    pub fn next(&self, h: HalfEdgeId) -> HalfEdgeId {
        HalfEdgeId(next_of(h.0))
    }

    pub fn prev(&self, h: HalfEdgeId) -> HalfEdgeId {
        HalfEdgeId(prev_of(h.0))
    }

    pub fn twin(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        self.half_edges[h.0].twin.map(HalfEdgeId)
    }

    pub fn face(&self, h: HalfEdgeId) -> FaceId {
        FaceId(h.0 / 3)
    }

    pub fn face_half_edge(&self, f: FaceId) -> HalfEdgeId {
        HalfEdgeId(3 * f.0)
    }

    pub fn face_vertices(&self, f: FaceId) -> [VertexId; 3] {
        let b = 3 * f.0;
        [
            VertexId(self.half_edges[b].origin),
            VertexId(self.half_edges[b + 1].origin),
            VertexId(self.half_edges[b + 2].origin),
        ]
    }

    pub fn face_positions(&self, f: FaceId) -> [Vec3; 3] {
        self.face_vertices(f).map(|v| self.positions[v.0])
    }

    pub fn edge_half_edge(&self, e: EdgeId) -> HalfEdgeId {
        HalfEdgeId(e.0)
    }

    pub fn edge_of(&self, h: HalfEdgeId) -> EdgeId {
        match self.half_edges[h.0].twin {
            Some(t) if t < h.0 => EdgeId(t),
            _ => EdgeId(h.0),
        }
    }

    pub fn edge_vertices(&self, e: EdgeId) -> (VertexId, VertexId) {
        let h = HalfEdgeId(e.0);
        (self.origin(h), self.dest(h))
    }

    pub fn edge_key(&self, e: EdgeId) -> EdgeKey {
        let (a, b) = self.edge_vertices(e);
        EdgeKey::new(a.0, b.0)
    }

    pub fn edge_length(&self, e: EdgeId) -> f64 {
        let (a, b) = self.edge_vertices(e);
        (self.positions[a.0] - self.positions[b.0]).norm()
    }

    /// Vertices opposite the edge in its one or two adjacent faces.
    pub fn edge_opposites(&self, e: EdgeId) -> (VertexId, Option<VertexId>) {
        let h = HalfEdgeId(e.0);
        let c = self.origin(self.prev(h));
        let d = self.twin(h).map(|t| self.origin(self.prev(t)));
        (c, d)
    }

    /// Faces adjacent to the edge; the second is `None` on the boundary.
    pub fn edge_faces(&self, e: EdgeId) -> (FaceId, Option<FaceId>) {
        let h = HalfEdgeId(e.0);
        (self.face(h), self.twin(h).map(|t| self.face(t)))
    }

    /// Outgoing half-edges of a vertex in counter-clockwise order. On the
    /// boundary the sequence starts at the half-edge without a twin.
    pub fn outgoing(&self, v: VertexId) -> Vec<HalfEdgeId> {
        self.outgoing_raw(v.0).into_iter().map(HalfEdgeId).collect()
    }

    fn outgoing_raw(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(8);
        let Some(start) = self.vertex_out[v] else {
            return out;
        };
        let mut h = start;
        let limit = self.half_edges.len() + 1;
        loop {
            out.push(h);
            match self.half_edges[prev_of(h)].twin {
                Some(t) if t != start => h = t,
                _ => break,
            }
            if out.len() > limit {
                break;
            }
        }
        out
    }

    /// 1-ring neighbours in counter-clockwise order.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let out = self.outgoing_raw(v.0);
        let mut ring: Vec<VertexId> = out
            .iter()
            .map(|&h| VertexId(self.half_edges[next_of(h)].origin))
            .collect();
        if let Some(&last) = out.last() {
            if self.half_edges[prev_of(last)].twin.is_none() {
                ring.push(VertexId(self.half_edges[prev_of(last)].origin));
            }
        }
        ring
    }

    /// Faces incident to a vertex, counter-clockwise.
    pub fn vertex_faces(&self, v: VertexId) -> Vec<FaceId> {
        self.outgoing_raw(v.0).into_iter().map(|h| FaceId(h / 3)).collect()
    }

    /// Number of incident edges, boundary edges included.
    pub fn vertex_degree(&self, v: VertexId) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.degree(v))
    }

    pub(crate) fn degree(&self, v: VertexId) -> usize {
        let out = self.outgoing_raw(v.0);
        match out.last() {
            Some(&last) if self.half_edges[prev_of(last)].twin.is_none() => out.len() + 1,
            _ => out.len(),
        }
    }

    pub fn is_isolated(&self, v: VertexId) -> bool {
        self.vertex_out[v.0].is_none()
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> Result<bool> {
        self.check_vertex(v)?;
        Ok(self.on_boundary(v))
    }

    pub(crate) fn on_boundary(&self, v: VertexId) -> bool {
        self.vertex_out[v.0].is_some_and(|h| self.half_edges[h].twin.is_none())
    }

    pub fn is_boundary_edge(&self, e: EdgeId) -> Result<bool> {
        self.check_edge(e)?;
        Ok(self.half_edges[e.0].twin.is_none())
    }

    /// Looks up the live edge joining two vertices.
    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        if !self.is_vertex_live(a) || !self.is_vertex_live(b) || a == b {
            return None;
        }
        for h in self.outgoing_raw(a.0) {
            if self.half_edges[next_of(h)].origin == b.0 {
                return Some(self.edge_of(HalfEdgeId(h)));
            }
        }
        for h in self.outgoing_raw(b.0) {
            if self.half_edges[next_of(h)].origin == a.0 {
                return Some(self.edge_of(HalfEdgeId(h)));
            }
        }
        None
    }

    // ---- mutation helpers ---------------------------------------------

    pub(crate) fn add_vertex(&mut self, p: Vec3) -> VertexId {
        self.live_vertices += 1;
        if let Some(v) = self.free_vertices.pop() {
            self.positions[v] = p;
            self.vertex_out[v] = None;
            self.vertex_live[v] = true;
            VertexId(v)
        } else {
            self.positions.push(p);
            self.vertex_out.push(None);
            self.vertex_live.push(true);
            VertexId(self.positions.len() - 1)
        }
    }

    pub(crate) fn delete_vertex(&mut self, v: VertexId) {
        debug_assert!(self.vertex_live[v.0]);
        self.vertex_live[v.0] = false;
        self.vertex_out[v.0] = None;
        self.live_vertices -= 1;
        self.free_vertices.push(v.0);
    }

    /// Swaps a patch of faces for new triangles, re-linking twins along the
    /// patch border by vertex pair. Vertices that no longer touch any face end
    /// up with no outgoing half-edge; the caller decides whether to delete them.
    pub(crate) fn replace_faces(&mut self, old: &[FaceId], new: &[[VertexId; 3]]) -> Vec<FaceId> {
        let mut outer: HashMap<(usize, usize), usize> = HashMap::new();
        let mut touched: Vec<usize> = Vec::new();
        for &f in old {
            for k in 0..3 {
                let h = 3 * f.0 + k;
                touched.push(self.half_edges[h].origin);
                if let Some(t) = self.half_edges[h].twin {
                    if !old.iter().any(|g| g.0 == t / 3) {
                        let a = self.half_edges[h].origin;
                        let b = self.half_edges[next_of(h)].origin;
                        outer.insert((a, b), t);
                        self.half_edges[t].twin = None;
                    }
                }
            }
        }
        for &f in old {
            debug_assert!(self.face_live[f.0]);
            self.face_live[f.0] = false;
            self.live_faces -= 1;
            self.free_faces.push(f.0);
        }

        let mut created = Vec::with_capacity(new.len());
        for tri in new {
            let f = match self.free_faces.pop() {
                Some(f) => {
                    self.face_live[f] = true;
                    f
                }
                None => {
                    self.face_live.push(true);
                    self.half_edges.extend([HalfEdge { origin: 0, twin: None }; 3]);
                    self.face_live.len() - 1
                }
            };
            self.live_faces += 1;
            for (k, v) in tri.iter().enumerate() {
                self.half_edges[3 * f + k] = HalfEdge {
                    origin: v.0,
                    twin: None,
                };
            }
            created.push(FaceId(f));
        }

        let mut inner: HashMap<(usize, usize), usize> = HashMap::new();
        for &f in &created {
            for k in 0..3 {
                let h = 3 * f.0 + k;
                let a = self.half_edges[h].origin;
                let b = self.half_edges[next_of(h)].origin;
                inner.insert((a, b), h);
            }
        }
        for &f in &created {
            for k in 0..3 {
                let h = 3 * f.0 + k;
                let a = self.half_edges[h].origin;
                let b = self.half_edges[next_of(h)].origin;
                if let Some(&t) = inner.get(&(b, a)) {
                    self.half_edges[h].twin = Some(t);
                } else if let Some(&t) = outer.get(&(a, b)) {
                    self.half_edges[h].twin = Some(t);
                    self.half_edges[t].twin = Some(h);
                }
            }
        }

        for &f in &created {
            for k in 0..3 {
                let h = 3 * f.0 + k;
                let v = self.half_edges[h].origin;
                self.vertex_out[v] = Some(h);
                touched.push(v);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for v in touched {
            if let Some(h) = self.vertex_out[v] {
                if !self.face_live[h / 3] || self.half_edges[h].origin != v {
                    self.vertex_out[v] = None;
                }
            }
            self.rewind_vertex_out(v);
        }
        created
    }

    /// Rotates a vertex's outgoing pointer clockwise onto the boundary
    /// half-edge, if the vertex has one.
    fn rewind_vertex_out(&mut self, v: usize) {
        let Some(start) = self.vertex_out[v] else {
            return;
        };
        let mut h = start;
        for _ in 0..=self.half_edges.len() {
            match self.half_edges[h].twin {
                None => break,
                Some(t) => {
                    let cw = next_of(t);
                    if cw == start {
                        break;
                    }
                    h = cw;
                }
            }
        }
        self.vertex_out[v] = Some(h);
    }

    // ---- export ---------------------------------------------------------

    /// Compacts live elements into dense buffers, keeping ascending id order.
    pub fn to_indexed(&self) -> IndexedMesh {
        let mut vertex_map = vec![None; self.positions.len()];
        let mut positions = Vec::with_capacity(self.live_vertices);
        for v in self.vertices() {
            vertex_map[v.0] = Some(positions.len());
            positions.push(self.positions[v.0]);
        }
        let triangles = self
            .faces()
            .map(|f| {
                self.face_vertices(f)
                    .map(|v| vertex_map[v.0].expect("face references deleted vertex"))
            })
            .collect();
        IndexedMesh {
            positions,
            triangles,
            vertex_map,
        }
    }
}
