//! The iterated split, collapse, flip and smooth schedule.

use std::time::Instant;

use log::{debug, info};
use serde::Serialize;

use crate::config::RemeshConfig;
use crate::consistency::{smooth_pass, upsample_mesh_with_bandwidth};
use crate::error::{Error, Result};
use crate::mesh::HalfEdgeMesh;
use crate::ops::{run_collapse_pass, run_flip_pass, run_split_pass, PassStats};

/// An iteration converges when its split, collapse and flip passes together
/// perform fewer than this fraction of the edge count.
pub const CONVERGENCE_FRACTION: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeshCounts {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

impl MeshCounts {
    pub fn of(mesh: &HalfEdgeMesh) -> Self {
        Self {
            vertices: mesh.n_vertices(),
            edges: mesh.n_edges(),
            faces: mesh.n_faces(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationReport {
    /// 1-based.
    pub iteration: usize,
    pub split: PassStats,
    pub collapse: PassStats,
    pub flip: PassStats,
    pub smooth: PassStats,
    /// Split, collapse and flip edits performed.
    pub edits: usize,
    pub before: MeshCounts,
    pub after: MeshCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub iterations: Vec<IterationReport>,
    pub initial: MeshCounts,
    #[serde(rename = "final")]
    pub final_counts: MeshCounts,
    pub converged: bool,
    /// Last iteration run; 0 when the budget was zero.
    pub iterations_run: usize,
    pub wall_time_s: f64,
    pub config: RemeshConfig,
}

impl RunReport {
    pub fn total_edits(&self) -> usize {
        self.iterations.iter().map(|it| it.edits).sum()
    }
}

/// `multi_parameter × ` the average edge length of `mesh`.
pub fn derive_target_length(mesh: &HalfEdgeMesh, multi_parameter: f64) -> Result<f64> {
    if !(multi_parameter > 0.0 && multi_parameter.is_finite()) {
        return Err(Error::InvalidConfig("multi-parameter must be positive".into()));
    }
    Ok(multi_parameter * mesh.average_edge_length()?)
}

/// Remeshes a copy of `mesh`. The input is validated before any editing and
/// the surface cloud is built from it once.
pub fn remesh(mesh: &HalfEdgeMesh, cfg: &RemeshConfig) -> Result<(HalfEdgeMesh, RunReport)> {
    let start = Instant::now();
    cfg.validate()?;
    if mesh.is_empty() {
        return Err(Error::EmptyInput("mesh has no faces"));
    }
    let validation = mesh.validate();
    if !validation.is_manifold || !validation.link_errors.is_empty() {
        return Err(Error::NonManifold(Box::new(validation)));
    }

    let mut out = mesh.clone();
    let initial = MeshCounts::of(mesh);
    let mut report = RunReport {
        iterations: Vec::new(),
        initial,
        final_counts: initial,
        converged: false,
        iterations_run: 0,
        wall_time_s: 0.0,
        config: cfg.clone(),
    };
    if cfg.iterations == 0 {
        report.wall_time_s = start.elapsed().as_secs_f64();
        return Ok((out, report));
    }

    let bandwidth = cfg.bandwidth_factor * mesh.average_edge_length()?;
    let cloud = upsample_mesh_with_bandwidth(mesh, bandwidth)?;
    debug!("surface cloud: {} samples, bandwidth {bandwidth}", cloud.len());

    for iteration in 1..=cfg.iterations {
        let before = MeshCounts::of(&out);
        let split = run_split_pass(&mut out, cfg);
        let collapse = run_collapse_pass(&mut out, cfg);
        let flip = run_flip_pass(&mut out, cfg);
        let smooth = smooth_pass(&mut out, &cloud, cfg);
        let edits = split.performed + collapse.performed + flip.performed;
        let after = MeshCounts::of(&out);
        info!(
            "iteration {iteration}: {} splits, {} collapses, {} flips, V={} F={}",
            split.performed, collapse.performed, flip.performed, after.vertices, after.faces
        );
        report.iterations.push(IterationReport {
            iteration,
            split,
            collapse,
            flip,
            smooth,
            edits,
            before,
            after,
        });
        report.iterations_run = iteration;
        if (edits as f64) < CONVERGENCE_FRACTION * before.edges as f64 {
            report.converged = true;
            break;
        }
    }

    report.final_counts = MeshCounts::of(&out);
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use approx::assert_abs_diff_eq;

    #[test]
    fn target_length_scales_average() {
        let m = shapes::hex_patch(2, 0.5);
        assert_abs_diff_eq!(derive_target_length(&m, 1.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(derive_target_length(&m, 2.0).unwrap(), 1.0, epsilon = 1e-12);
        assert!(derive_target_length(&m, 0.0).is_err());
        assert!(derive_target_length(&m, f64::NAN).is_err());
    }

    #[test]
    fn empty_mesh_is_rejected() {
        let m = HalfEdgeMesh::build(vec![], &[]).unwrap();
        assert!(derive_target_length(&m, 1.0).is_err());
        assert!(remesh(&m, &RemeshConfig::default()).is_err());
    }

    #[test]
    fn invalid_config_fails_before_editing() {
        let cfg = RemeshConfig {
            lambda: 0.0,
            ..RemeshConfig::default()
        };
        assert!(matches!(remesh(&shapes::icosahedron(), &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn zero_budget_returns_a_copy() {
        let m = shapes::perturbed_sphere(3, 0.1, 1);
        let cfg = RemeshConfig {
            iterations: 0,
            ..RemeshConfig::with_target_length(0.3)
        };
        let (out, rep) = remesh(&m, &cfg).unwrap();
        assert_eq!(out.to_indexed(), m.to_indexed());
        assert!(rep.iterations.is_empty());
        assert!(!rep.converged);
    }

    #[test]
    fn regular_patch_is_a_fixpoint() {
        let m = shapes::hex_patch(4, 1.0);
        let (out, rep) = remesh(&m, &RemeshConfig::with_target_length(1.0)).unwrap();
        assert_eq!(rep.iterations.len(), 1);
        assert_eq!(rep.iterations[0].edits, 0);
        assert!(rep.converged);
        let (a, b) = (out.to_indexed(), m.to_indexed());
        assert_eq!(a.triangles, b.triangles);
        for (p, q) in a.positions.iter().zip(&b.positions) {
            assert!((p - q).norm() < 1e-12);
        }
    }

    #[test]
    fn counts_follow_the_edits() {
        let m = shapes::perturbed_sphere(4, 0.15, 7);
        let l = derive_target_length(&m, 0.7).unwrap();
        let (out, rep) = remesh(&m, &RemeshConfig::with_target_length(l)).unwrap();
        assert!(rep.iterations.len() <= 10);
        assert_eq!(rep.final_counts, MeshCounts::of(&out));
        for it in &rep.iterations {
            let dv = it.split.performed as i64 - it.collapse.performed as i64;
            assert_eq!(it.after.vertices as i64 - it.before.vertices as i64, dv);
            assert_eq!(it.after.edges as i64 - it.before.edges as i64, 3 * dv);
            assert_eq!(it.after.faces as i64 - it.before.faces as i64, 2 * dv);
        }
        for pair in rep.iterations.windows(2) {
            assert_eq!(pair[0].after, pair[1].before);
        }
    }
}
