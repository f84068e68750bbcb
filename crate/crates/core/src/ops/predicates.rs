use crate::config::RemeshConfig;
use crate::error::{Error, Result};
use crate::mesh::{raw_normal, triangle_angles, EdgeId, HalfEdgeMesh, Vec3, VertexId};

use super::{EditDecision, EditReason as R};

fn ideal_degree(mesh: &HalfEdgeMesh, v: VertexId) -> i64 {
    if mesh.on_boundary(v) {
        4
    } else {
        6
    }
}

fn midpoint(mesh: &HalfEdgeMesh, e: EdgeId) -> Vec3 {
    let (a, b) = mesh.edge_vertices(e);
    0.5 * (mesh.position(a) + mesh.position(b))
}

/// Slack absorbing round-off, so an exact right angle is not obtuse.
pub(crate) const OBTUSE_SLACK_DEG: f64 = 1e-7;

/// An angle is obtuse when it strictly exceeds the threshold.
pub(crate) fn is_obtuse(angle_rad: f64, threshold_deg: f64) -> bool {
    angle_rad.to_degrees() > threshold_deg + OBTUSE_SLACK_DEG
}

fn any_obtuse(p: [Vec3; 3], threshold_deg: f64) -> bool {
    triangle_angles(p).iter().any(|&x| is_obtuse(x, threshold_deg))
}

/// Angle in degrees between the normals of the two faces of an interior
/// edge; `None` on the boundary or when either face is degenerate.
pub fn dihedral_angle(mesh: &HalfEdgeMesh, e: EdgeId) -> Option<f64> {
    let (f0, f1) = mesh.edge_faces(e);
    let n0 = raw_normal(mesh.face_positions(f0)).try_normalize(0.0)?;
    let n1 = raw_normal(mesh.face_positions(f1?)).try_normalize(0.0)?;
    Some(n0.dot(&n1).clamp(-1.0, 1.0).acos().to_degrees())
}

pub fn should_split(mesh: &HalfEdgeMesh, e: EdgeId, cfg: &RemeshConfig) -> Result<EditDecision> {
    mesh.check_edge(e)?;
    if mesh.edge_length(e) <= cfg.split_length() {
        return Ok(EditDecision::blocked(R::LengthNotTriggered));
    }
    if cfg.angle_opt_enabled {
        // Every angle of an adjacent face either touches or faces the edge,
        // so all of them are checked.
        let (f0, f1) = mesh.edge_faces(e);
        for f in std::iter::once(f0).chain(f1) {
            if any_obtuse(mesh.face_positions(f), cfg.obtuse_threshold_deg) {
                return Ok(EditDecision::blocked(R::ObtuseAdjacent));
            }
        }
    }
    Ok(EditDecision::OK)
}

pub fn should_collapse(mesh: &HalfEdgeMesh, e: EdgeId, cfg: &RemeshConfig) -> Result<EditDecision> {
    mesh.check_edge(e)?;
    if mesh.edge_length(e) >= cfg.collapse_length() {
        return Ok(EditDecision::blocked(R::LengthNotTriggered));
    }
    let (a, b) = mesh.edge_vertices(e);
    if mesh.on_boundary(a) || mesh.on_boundary(b) {
        return Ok(EditDecision::blocked(R::BoundaryEndpoint));
    }
    if cfg.angle_opt_enabled && mesh.degree(a) + mesh.degree(b) - 4 > cfg.max_degree {
        return Ok(EditDecision::blocked(R::DegreeExceeded));
    }
    if !mesh.link_condition_holds(e) {
        return Ok(EditDecision::blocked(R::LinkCondition));
    }
    let p = midpoint(mesh, e);
    let limit = cfg.split_length();
    let too_long = mesh
        .neighbors(a)
        .into_iter()
        .chain(mesh.neighbors(b))
        .filter(|&v| v != a && v != b)
        .any(|v| (mesh.position(v) - p).norm() > limit);
    if too_long {
        return Ok(EditDecision::blocked(R::CreatesLongEdge));
    }
    match mesh.collapse_admissible(e, p) {
        Ok(()) => Ok(EditDecision::OK),
        Err(Error::BlockedTopology(_)) => Ok(EditDecision::blocked(R::TopologyBlocked)),
        Err(Error::BlockedGeometry(_)) => Ok(EditDecision::blocked(R::GeometryFold)),
        Err(other) => Err(other),
    }
}

pub fn should_flip(mesh: &HalfEdgeMesh, e: EdgeId, cfg: &RemeshConfig) -> Result<EditDecision> {
    mesh.check_edge(e)?;
    let (a, b) = mesh.edge_vertices(e);
    let (c, d) = mesh.edge_opposites(e);
    let Some(d) = d else {
        return Ok(EditDecision::blocked(R::TopologyBlocked));
    };
    if c == d || mesh.find_edge(c, d).is_some() {
        return Ok(EditDecision::blocked(R::TopologyBlocked));
    }
    if dihedral_angle(mesh, e).is_some_and(|theta| theta > cfg.dihedral_eps_deg) {
        return Ok(EditDecision::blocked(R::DihedralExceeded));
    }

    let dev = |v: VertexId, delta: i64| {
        let x = mesh.degree(v) as i64 + delta - ideal_degree(mesh, v);
        x * x
    };
    let before = dev(a, 0) + dev(b, 0) + dev(c, 0) + dev(d, 0);
    let after = dev(a, -1) + dev(b, -1) + dev(c, 1) + dev(d, 1);
    if after >= before {
        return Ok(EditDecision::blocked(R::NoValenceGain));
    }

    let [pa, pb, pc, pd] = [a, b, c, d].map(|v| mesh.position(v));
    let (f0, f1) = mesh.edge_faces(e);
    let old = raw_normal(mesh.face_positions(f0)) + raw_normal(mesh.face_positions(f1.expect("interior edge")));
    let new_faces = [[pc, pa, pd], [pd, pb, pc]];
    for t in new_faces {
        let n = raw_normal(t);
        if 0.5 * n.norm() < mesh.degenerate_area() || n.dot(&old) <= 0.0 {
            return Ok(EditDecision::blocked(R::GeometryFold));
        }
    }

    if cfg.angle_opt_enabled && new_faces.iter().any(|&t| any_obtuse(t, cfg.obtuse_threshold_deg)) {
        return Ok(EditDecision::blocked(R::NewObtuse));
    }
    Ok(EditDecision::OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::EditReason;
    use crate::shapes;

    fn cfg(l: f64) -> RemeshConfig {
        RemeshConfig::with_target_length(l)
    }

    #[test]
    fn split_long_acute_edge_is_allowed() {
        let (m, e) = shapes::acute_split_fixture();
        assert!((m.edge_length(e) - 1.5).abs() < 1e-12);
        assert_eq!(should_split(&m, e, &cfg(1.0)).unwrap(), EditDecision::OK);
    }

    #[test]
    fn split_blocked_by_obtuse_opposite_angle() {
        let (m, e) = shapes::obtuse_split_fixture();
        let (f0, _) = m.edge_faces(e);
        let max = m.face_angles(f0).unwrap().max().to_degrees();
        assert!((max - 120.0).abs() < 1e-9);
        assert_eq!(
            should_split(&m, e, &cfg(1.0)).unwrap().reason,
            EditReason::ObtuseAdjacent
        );
        let off = RemeshConfig {
            angle_opt_enabled: false,
            ..cfg(1.0)
        };
        assert!(should_split(&m, e, &off).unwrap().allowed);
    }

    #[test]
    fn split_short_edge_not_triggered() {
        let (m, e) = shapes::acute_split_fixture();
        assert_eq!(
            should_split(&m, e, &cfg(1.5 / 1.2)).unwrap().reason,
            EditReason::LengthNotTriggered
        );
    }

    #[test]
    fn collapse_boundary_endpoint_blocked() {
        let m = shapes::hex_patch(2, 0.5);
        let e = m.edges().find(|&e| m.is_boundary_edge(e).unwrap()).unwrap();
        assert_eq!(
            should_collapse(&m, e, &cfg(1.0)).unwrap().reason,
            EditReason::BoundaryEndpoint
        );
        // interior edge with one endpoint on the rim
        let e = m
            .edges()
            .find(|&e| {
                let (a, b) = m.edge_vertices(e);
                !m.is_boundary_edge(e).unwrap() && (m.on_boundary(a) != m.on_boundary(b))
            })
            .unwrap();
        assert_eq!(
            should_collapse(&m, e, &cfg(1.0)).unwrap().reason,
            EditReason::BoundaryEndpoint
        );
    }

    #[test]
    fn collapse_blocked_by_predicted_degree() {
        let (m, e) = shapes::degree_collapse_fixture();
        let (a, b) = m.edge_vertices(e);
        let mut degs = [m.degree(a), m.degree(b)];
        degs.sort();
        assert_eq!(degs, [5, 6]);
        assert_eq!(
            should_collapse(&m, e, &cfg(1.0)).unwrap().reason,
            EditReason::DegreeExceeded
        );
    }

    #[test]
    fn diamond_collapse_allowed_and_every_condition_holds() {
        let (m, e) = shapes::diamond_collapse_fixture();
        let c = cfg(1.0);
        let (a, b) = m.edge_vertices(e);
        // direct evaluation of each condition
        assert!(m.edge_length(e) < 0.8);
        assert!(!m.on_boundary(a) && !m.on_boundary(b));
        assert!(m.degree(a) + m.degree(b) - 4 <= 6);
        assert!(m.link_condition_holds(e));
        let p = 0.5 * (m.position(a) + m.position(b));
        for v in m.neighbors(a).into_iter().chain(m.neighbors(b)) {
            if v != a && v != b {
                assert!((m.position(v) - p).norm() <= 4.0 / 3.0);
            }
        }
        assert_eq!(should_collapse(&m, e, &c).unwrap(), EditDecision::OK);
        let mut after = m.clone();
        after.collapse_edge_topo(e, p).unwrap();
        for f in after.faces() {
            assert!(after.face_normal(f).z > 0.0);
        }
    }

    #[test]
    fn collapse_long_edge_blocked() {
        let (m, e) = shapes::diamond_collapse_fixture();
        // with l = 0.5 the post-collapse spokes (0.5 to 0.7) exceed 4/3 * 0.5
        let c = RemeshConfig {
            collapse_factor: 0.99,
            ..cfg(0.51)
        };
        assert_eq!(
            should_collapse(&m, e, &c).unwrap().reason,
            EditReason::CreatesLongEdge
        );
    }

    #[test]
    fn collapse_link_condition_blocked() {
        // after one octahedron collapse the survivor shares three neighbours
        // with each of its equatorial neighbours
        let mut m = shapes::octahedron();
        let e = m.edges().next().unwrap();
        let (a, b) = m.edge_vertices(e);
        let s = m.collapse_edge_topo(e, 0.5 * (m.position(a) + m.position(b))).unwrap();
        let e = m
            .neighbors(s)
            .into_iter()
            .map(|n| m.find_edge(s, n).unwrap())
            .find(|&e| !m.link_condition_holds(e))
            .unwrap();
        let c = RemeshConfig {
            max_degree: 20,
            ..cfg(10.0)
        };
        assert_eq!(should_collapse(&m, e, &c).unwrap().reason, EditReason::LinkCondition);
    }

    #[test]
    fn flip_new_obtuse_blocked() {
        let (m, e) = shapes::valence_flip_fixture(0.5, 1.0, 0.0);
        assert_eq!(should_flip(&m, e, &cfg(1.0)).unwrap().reason, EditReason::NewObtuse);
        let off = RemeshConfig {
            angle_opt_enabled: false,
            ..cfg(1.0)
        };
        assert!(should_flip(&m, e, &off).unwrap().allowed);
    }

    #[test]
    fn flip_planar_valence_gain_allowed() {
        let (m, e) = shapes::valence_flip_fixture(0.6, 0.5, 0.0);
        let (c, d) = m.edge_opposites(e);
        let (a, b) = m.edge_vertices(e);
        let [pa, pb, pc, pd] = [a, b, c, d.unwrap()].map(|v| m.position(v));
        for t in [[pc, pa, pd], [pd, pb, pc]] {
            for x in triangle_angles(t) {
                let deg = x.to_degrees();
                assert!((45.0..90.0).contains(&deg), "{deg}");
            }
        }
        assert_eq!(dihedral_angle(&m, e).unwrap(), 0.0);
        assert_eq!(should_flip(&m, e, &cfg(1.0)).unwrap(), EditDecision::OK);
    }

    #[test]
    fn flip_dihedral_blocked() {
        let (m, e) = shapes::valence_flip_fixture(0.6, 0.5, 30.0);
        assert!((dihedral_angle(&m, e).unwrap() - 30.0).abs() < 1e-9);
        assert_eq!(
            should_flip(&m, e, &cfg(1.0)).unwrap().reason,
            EditReason::DihedralExceeded
        );
    }

    #[test]
    fn flip_topology_blocks() {
        let m = shapes::tetrahedron();
        let e = m.edges().next().unwrap();
        assert_eq!(should_flip(&m, e, &cfg(1.0)).unwrap().reason, EditReason::TopologyBlocked);
        let m = shapes::single_triangle();
        let e = m.edges().next().unwrap();
        assert_eq!(should_flip(&m, e, &cfg(1.0)).unwrap().reason, EditReason::TopologyBlocked);
    }

    #[test]
    fn regular_patch_has_no_valence_gain() {
        let m = shapes::hex_patch(3, 1.0);
        for e in m.edges() {
            let (a, b) = m.edge_vertices(e);
            if m.is_boundary_edge(e).unwrap() || m.on_boundary(a) || m.on_boundary(b) {
                continue;
            }
            let r = should_flip(&m, e, &cfg(1.0)).unwrap().reason;
            assert_eq!(r, EditReason::NoValenceGain);
        }
    }

    #[test]
    fn stale_handles_error() {
        let mut m = shapes::icosphere(1);
        let e = m.edges().nth(5).unwrap();
        let (a, b) = m.edge_vertices(e);
        m.collapse_edge_topo(e, 0.5 * (m.position(a) + m.position(b))).unwrap();
        let dead = (0..m.half_edge_capacity())
            .map(EdgeId)
            .find(|&e| !m.is_edge_live(e))
            .unwrap();
        let c = cfg(1.0);
        assert!(matches!(should_split(&m, dead, &c), Err(Error::StaleHandle(_))));
        assert!(matches!(should_collapse(&m, dead, &c), Err(Error::StaleHandle(_))));
        assert!(matches!(should_flip(&m, dead, &c), Err(Error::StaleHandle(_))));
    }

    #[test]
    fn decisions_are_pure() {
        let m = shapes::perturbed_sphere(3, 0.15, 4);
        let snapshot = m.to_indexed();
        let c = cfg(m.average_edge_length().unwrap());
        for e in m.edges() {
            for f in [should_split, should_collapse, should_flip] {
                assert_eq!(f(&m, e, &c).unwrap(), f(&m, e, &c).unwrap());
            }
        }
        let after = m.to_indexed();
        assert_eq!(snapshot.positions, after.positions);
        assert_eq!(snapshot.triangles, after.triangles);
    }
}
