use std::collections::VecDeque;
use std::time::Instant;

use log::debug;
use rayon::prelude::*;

use crate::config::RemeshConfig;
use crate::error::Error;
use crate::mesh::{EdgeId, HalfEdgeMesh, VertexId};

use super::{should_collapse, should_flip, should_split, EditDecision, EditReason, PassKind, PassStats};

/// Safety valve on re-enqueueing edges created by splits within one pass.
pub const MAX_SPLIT_GENERATIONS: u32 = 10;

/// Σ (deg(v) − ideal(v))² with ideal 6 inside and 4 on the boundary.
pub fn valence_energy(mesh: &HalfEdgeMesh) -> i64 {
    mesh.vertices()
        .filter(|&v| !mesh.is_isolated(v))
        .map(|v| {
            let ideal = if mesh.on_boundary(v) { 4 } else { 6 };
            let d = mesh.degree(v) as i64 - ideal;
            d * d
        })
        .sum()
}

/// Live edges passing `keep`, as endpoint pairs in ascending edge-id order.
/// The filter runs in parallel; the order of the result does not depend on it.
fn candidates(mesh: &HalfEdgeMesh, keep: impl Fn(EdgeId) -> bool + Sync) -> Vec<(VertexId, VertexId)> {
    let edges: Vec<EdgeId> = mesh.edges().collect();
    edges
        .into_par_iter()
        .filter(|&e| keep(e))
        .map(|e| mesh.edge_vertices(e))
        .collect()
}

fn primitive_failure(err: &Error) -> EditDecision {
    match err {
        Error::BlockedGeometry(_) | Error::Degenerate(_) => EditDecision::blocked(EditReason::GeometryFold),
        _ => EditDecision::blocked(EditReason::TopologyBlocked),
    }
}

fn resolve(mesh: &HalfEdgeMesh, (a, b): (VertexId, VertexId)) -> Option<EdgeId> {
    if !mesh.is_vertex_live(a) || !mesh.is_vertex_live(b) {
        return None;
    }
    mesh.find_edge(a, b)
}

pub fn run_split_pass(mesh: &mut HalfEdgeMesh, cfg: &RemeshConfig) -> PassStats {
    run_split_pass_observed(mesh, cfg, |_, _| {})
}

/// Split pass that reports every inserted vertex to `observe` right after
/// the split.
pub(crate) fn run_split_pass_observed(
    mesh: &mut HalfEdgeMesh,
    cfg: &RemeshConfig,
    mut observe: impl FnMut(&HalfEdgeMesh, VertexId),
) -> PassStats {
    let start = Instant::now();
    let mut stats = PassStats::new(PassKind::Split);
    let limit = cfg.split_length();
    let mut queue: VecDeque<((VertexId, VertexId), u32)> = candidates(mesh, |e| mesh.edge_length(e) > limit)
        .into_iter()
        .map(|pair| (pair, 0))
        .collect();

    while let Some((pair, generation)) = queue.pop_front() {
        let Some(e) = resolve(mesh, pair) else {
            stats.stale_skipped += 1;
            continue;
        };
        let decision = should_split(mesh, e, cfg).expect("live edge");
        if !decision.allowed {
            stats.record(decision);
            continue;
        }
        let (a, b) = mesh.edge_vertices(e);
        let mid = 0.5 * (mesh.position(a) + mesh.position(b));
        match mesh.split_edge_topo(e, mid) {
            Ok(m) => {
                stats.record(EditDecision::OK);
                observe(mesh, m);
                if generation + 1 < MAX_SPLIT_GENERATIONS {
                    for n in mesh.neighbors(m) {
                        if (mesh.position(n) - mid).norm() > limit {
                            queue.push_back(((m, n), generation + 1));
                        }
                    }
                }
            }
            Err(err) => stats.record(primitive_failure(&err)),
        }
    }
    stats.wall_time_s = start.elapsed().as_secs_f64();
    debug!("split pass: {stats:?}");
    stats
}

pub fn run_collapse_pass(mesh: &mut HalfEdgeMesh, cfg: &RemeshConfig) -> PassStats {
    let start = Instant::now();
    let mut stats = PassStats::new(PassKind::Collapse);
    let limit = cfg.collapse_length();
    for pair in candidates(mesh, |e| mesh.edge_length(e) < limit) {
        let Some(e) = resolve(mesh, pair) else {
            stats.stale_skipped += 1;
            continue;
        };
        let decision = should_collapse(mesh, e, cfg).expect("live edge");
        if !decision.allowed {
            stats.record(decision);
            continue;
        }
        let (a, b) = mesh.edge_vertices(e);
        let mid = 0.5 * (mesh.position(a) + mesh.position(b));
        match mesh.collapse_edge_topo(e, mid) {
            Ok(_) => stats.record(EditDecision::OK),
            Err(err) => stats.record(primitive_failure(&err)),
        }
    }
    stats.wall_time_s = start.elapsed().as_secs_f64();
    debug!("collapse pass: {stats:?}");
    stats
}

pub fn run_flip_pass(mesh: &mut HalfEdgeMesh, cfg: &RemeshConfig) -> PassStats {
    let start = Instant::now();
    let mut stats = PassStats::new(PassKind::Flip);
    for pair in candidates(mesh, |e| mesh.edge_faces(e).1.is_some()) {
        let Some(e) = resolve(mesh, pair) else {
            stats.stale_skipped += 1;
            continue;
        };
        let decision = should_flip(mesh, e, cfg).expect("live edge");
        if !decision.allowed {
            stats.record(decision);
            continue;
        }
        match mesh.flip_edge_topo(e) {
            Ok(()) => stats.record(EditDecision::OK),
            Err(err) => stats.record(primitive_failure(&err)),
        }
    }
    stats.wall_time_s = start.elapsed().as_secs_f64();
    debug!("flip pass: {stats:?}");
    stats
}
