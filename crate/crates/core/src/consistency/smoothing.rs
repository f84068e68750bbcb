use std::time::Instant;

use log::debug;
use rayon::prelude::*;
use serde::Serialize;

use super::{mls_project, SurfaceCloud};
use crate::config::RemeshConfig;
use crate::error::{Error, Result};
use crate::mesh::{raw_normal, triangle_area, HalfEdgeMesh, Vec3, VertexId};
use crate::ops::{EditDecision, EditReason, PassKind, PassStats};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingScheme {
    Uniform,
    #[default]
    Area,
    Cotangent,
}

fn cot(apex: Vec3, p: Vec3, q: Vec3) -> f64 {
    let u = p - apex;
    let v = q - apex;
    let s = u.cross(&v).norm();
    if s == 0.0 {
        return 0.0;
    }
    u.dot(&v) / s
}

/// Normalized 1-ring weights of `v`, in `neighbors(v)` order.
pub fn centroid_weights(mesh: &HalfEdgeMesh, v: VertexId, scheme: WeightingScheme) -> Result<Vec<(VertexId, f64)>> {
    mesh.check_vertex(v)?;
    let ring = mesh.neighbors(v);
    if ring.is_empty() {
        return Err(Error::IsolatedVertex(v.0));
    }
    let pv = mesh.position(v);
    let raw: Vec<f64> = match scheme {
        WeightingScheme::Uniform => vec![1.0; ring.len()],
        WeightingScheme::Area | WeightingScheme::Cotangent => ring
            .iter()
            .map(|&j| {
                let e = mesh.find_edge(v, j).expect("ring neighbour shares an edge");
                let pj = mesh.position(j);
                let (c, d) = mesh.edge_opposites(e);
                std::iter::once(c)
                    .chain(d)
                    .map(|o| {
                        let po = mesh.position(o);
                        match scheme {
                            WeightingScheme::Area => triangle_area([pv, pj, po]),
                            _ => 0.5 * cot(po, pv, pj),
                        }
                    })
                    .sum::<f64>()
                    .max(0.0)
            })
            .collect(),
    };
    let total: f64 = raw.iter().sum();
    let weights = if total > 1e-300 && total.is_finite() {
        raw.iter().map(|w| w / total).collect::<Vec<_>>()
    } else {
        vec![1.0 / ring.len() as f64; ring.len()]
    };
    Ok(ring.into_iter().zip(weights).collect())
}

/// Weighted 1-ring centroid `Σ w_j p_j`.
pub fn weighted_centroid(mesh: &HalfEdgeMesh, v: VertexId, scheme: WeightingScheme) -> Result<Vec3> {
    Ok(centroid_weights(mesh, v, scheme)?
        .into_iter()
        .map(|(j, w)| w * mesh.position(j))
        .sum())
}

/// `(I − n nᵀ) d` for unit `n`.
pub fn tangent_project(n: Vec3, d: Vec3) -> Vec3 {
    d - n * n.dot(&d)
}

/// `p + λ (I − n nᵀ)(c − p)`.
pub fn tangential_update(p: Vec3, centroid: Vec3, n: Vec3, lambda: f64) -> Vec3 {
    p + lambda * tangent_project(n, centroid - p)
}

/// True when moving `v` to `target` keeps every incident face non-degenerate
/// and turns no face normal by more than 90°.
fn move_is_safe(mesh: &HalfEdgeMesh, v: VertexId, target: Vec3) -> bool {
    mesh.vertex_faces(v).into_iter().all(|f| {
        let vs = mesh.face_vertices(f);
        let old = mesh.face_positions(f);
        let new = [0, 1, 2].map(|k| if vs[k] == v { target } else { old[k] });
        let n_new = raw_normal(new);
        0.5 * n_new.norm() >= mesh.degenerate_area() && raw_normal(old).dot(&n_new) > 0.0
    })
}

/// One tangential relaxation sweep over the interior vertices. Proposals are
/// computed against the positions at the start of the pass and applied in
/// ascending vertex order; boundary vertices never move.
pub fn smooth_pass(mesh: &mut HalfEdgeMesh, cloud: &SurfaceCloud, cfg: &RemeshConfig) -> PassStats {
    let start = Instant::now();
    let mut stats = PassStats::new(PassKind::Smooth);
    let normals = mesh.normals();
    let targets: Vec<VertexId> = mesh
        .vertices()
        .filter(|&v| !mesh.is_isolated(v) && !mesh.on_boundary(v))
        .collect();

    let frozen: &HalfEdgeMesh = mesh;
    let proposals: Vec<(VertexId, Option<Vec3>, bool)> = targets
        .par_iter()
        .map(|&v| {
            let Some(n) = normals.vertex_normal(v) else {
                return (v, None, false);
            };
            let p = frozen.position(v);
            let c = weighted_centroid(frozen, v, cfg.weighting).expect("non-isolated live vertex");
            let moved = tangential_update(p, c, n, cfg.lambda);
            if !cfg.mls_enabled {
                return (v, Some(moved), false);
            }
            match mls_project(moved, cloud) {
                Ok(q) => (v, Some(q), false),
                Err(_) => (v, Some(moved), true),
            }
        })
        .collect();

    for (v, target, projection_failed) in proposals {
        stats.projection_failures += usize::from(projection_failed);
        let Some(target) = target else {
            stats.record(EditDecision::blocked(EditReason::GeometryFold));
            continue;
        };
        if move_is_safe(mesh, v, target) {
            mesh.set_position(v, target);
            stats.record(EditDecision::OK);
        } else {
            stats.record(EditDecision::blocked(EditReason::GeometryFold));
        }
    }
    stats.wall_time_s = start.elapsed().as_secs_f64();
    debug!("smooth pass: {stats:?}");
    stats
}
