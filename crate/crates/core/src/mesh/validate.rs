use std::collections::HashMap;

use serde::Serialize;

use super::{next_of, EdgeKey, HalfEdgeMesh};

/// Result of a full structural audit. Problems are reported, never thrown.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MeshValidationReport {
    pub is_manifold: bool,
    pub boundary_edge_count: usize,
    pub non_manifold_edges: Vec<EdgeKey>,
    pub non_manifold_vertices: Vec<usize>,
    pub degenerate_faces: Vec<usize>,
    /// Broken half-edge links (twin involution, dangling references).
    pub link_errors: Vec<String>,
    pub euler_characteristic: i64,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

impl HalfEdgeMesh {
    pub fn validate(&self) -> MeshValidationReport {
        let mut report = MeshValidationReport::default();
        let mut pair_count: HashMap<EdgeKey, usize> = HashMap::new();
        let mut out_count = vec![0usize; self.vertex_capacity()];

        for f in self.faces() {
            if self.is_face_degenerate(f) {
                report.degenerate_faces.push(f.0);
            }
            for k in 0..3 {
                let h = 3 * f.0 + k;
                let a = self.half_edges[h].origin;
                let b = self.half_edges[next_of(h)].origin;
                if !self.vertex_live[a] {
                    report.link_errors.push(format!("face {} uses deleted vertex {a}", f.0));
                    continue;
                }
                out_count[a] += 1;
                *pair_count.entry(EdgeKey::new(a, b)).or_default() += 1;
                match self.half_edges[h].twin {
                    None => report.boundary_edge_count += 1,
                    Some(t) => {
                        if !self.face_live[t / 3] {
                            report.link_errors.push(format!("half-edge {h} twins dead half-edge {t}"));
                        } else if self.half_edges[t].twin != Some(h) {
                            report.link_errors.push(format!("twin of {t} is not {h}"));
                        } else if self.half_edges[t].origin != b || self.half_edges[next_of(t)].origin != a {
                            report.link_errors.push(format!("half-edges {h} and {t} disagree on endpoints"));
                        }
                    }
                }
            }
        }

        report.non_manifold_edges = pair_count
            .iter()
            .filter(|(_, &c)| c > 2)
            .map(|(&k, _)| k)
            .collect();
        report.non_manifold_edges.sort();

        for v in self.vertices() {
            let fan = self.outgoing_raw(v.0);
            if fan.len() != out_count[v.0] {
                report.non_manifold_vertices.push(v.0);
            }
            if let Some(h) = self.vertex_out[v.0] {
                let first_is_boundary = self.half_edges[h].twin.is_none();
                let any_boundary = fan.iter().any(|&g| self.half_edges[g].twin.is_none());
                if any_boundary && !first_is_boundary {
                    report.link_errors.push(format!("vertex {} fan does not start on the boundary", v.0));
                }
            }
        }

        report.vertices = self.n_vertices();
        report.faces = self.n_faces();
        report.edges = pair_count.len();
        report.euler_characteristic =
            report.vertices as i64 - report.edges as i64 + report.faces as i64;
        report.is_manifold = report.non_manifold_edges.is_empty()
            && report.non_manifold_vertices.is_empty()
            && report.link_errors.is_empty();
        report
    }
}
