use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{FaceId, HalfEdgeMesh, Vec3};
use crate::spatial::TriangleBvh;

const MAX_DEFAULT_SAMPLES: usize = 1_000_000;

/// `100 × V`, capped at one million.
pub fn default_sample_count(mesh: &HalfEdgeMesh) -> usize {
    (100 * mesh.n_vertices()).min(MAX_DEFAULT_SAMPLES)
}

/// Oriented surface samples. `face[i]` is `None` for samples taken at vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceSamples {
    pub points: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub face: Vec<Option<FaceId>>,
}

impl SurfaceSamples {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// All vertices plus `n − V` area-proportional samples on faces. Face quotas
/// are the floors of their exact shares; leftover samples go to faces drawn
/// by area. Requests below `V` return just the vertices.
pub fn sample_surface(mesh: &HalfEdgeMesh, n: usize, seed: u64) -> Result<SurfaceSamples> {
    let faces: Vec<FaceId> = mesh.faces().collect();
    let areas: Vec<f64> = faces.iter().map(|&f| mesh.face_area(f)).collect();
    let total: f64 = areas.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::Degenerate("mesh has zero surface area".into()));
    }
    let normals = mesh.normals();
    let mut out = SurfaceSamples {
        points: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        face: Vec::with_capacity(n),
    };
    for v in mesh.vertices() {
        out.points.push(mesh.position(v));
        out.normals.push(normals.vertex[v.0]);
        out.face.push(None);
    }
    let extra = n.saturating_sub(out.points.len());
    if extra == 0 {
        return Ok(out);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut quota: Vec<usize> = areas
        .iter()
        .map(|a| (extra as f64 * a / total).floor() as usize)
        .collect();
    let assigned: usize = quota.iter().sum();
    let pick = WeightedIndex::new(&areas).map_err(|e| Error::Degenerate(e.to_string()))?;
    for _ in assigned..extra {
        quota[pick.sample(&mut rng)] += 1;
    }

    for (k, &f) in faces.iter().enumerate() {
        let [a, b, c] = mesh.face_positions(f);
        for _ in 0..quota[k] {
            let s = rng.random::<f64>().sqrt();
            let t = rng.random::<f64>();
            out.points.push((1.0 - s) * a + s * (1.0 - t) * b + s * t * c);
            out.normals.push(normals.face[f.0]);
            out.face.push(Some(f));
        }
    }
    Ok(out)
}

/// Exact point-to-surface distance queries against one mesh.
#[derive(Clone, Debug)]
pub struct MeshDistance {
    bvh: TriangleBvh,
}

impl MeshDistance {
    pub fn new(mesh: &HalfEdgeMesh) -> Self {
        Self {
            bvh: TriangleBvh::new(mesh.faces().map(|f| mesh.face_positions(f)).collect()),
        }
    }

    pub fn distance(&self, q: Vec3) -> f64 {
        self.bvh.distance(q)
    }

    /// Max and mean distance of `points` to this surface. Per-point values
    /// are computed in parallel and reduced in input order.
    pub fn directed(&self, points: &[Vec3]) -> DirectedDistance {
        let d: Vec<f64> = points.par_iter().map(|&p| self.distance(p)).collect();
        let max = d.iter().copied().fold(0.0, f64::max);
        let mean = if d.is_empty() { 0.0 } else { d.iter().sum::<f64>() / d.len() as f64 };
        DirectedDistance { max, mean }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectedDistance {
    pub max: f64,
    pub mean: f64,
}

/// Distance from `q` to the closest point of any face of `mesh`.
pub fn point_to_mesh_distance(q: Vec3, mesh: &HalfEdgeMesh) -> f64 {
    MeshDistance::new(mesh).distance(q)
}

fn both_directions(a: &HalfEdgeMesh, b: &HalfEdgeMesh, n: usize, seed: u64) -> Result<(DirectedDistance, DirectedDistance)> {
    let sa = sample_surface(a, n, seed)?;
    let sb = sample_surface(b, n, seed)?;
    Ok((MeshDistance::new(b).directed(&sa.points), MeshDistance::new(a).directed(&sb.points)))
}

/// Symmetric sampled Hausdorff distance.
pub fn hausdorff_distance(a: &HalfEdgeMesh, b: &HalfEdgeMesh, n: usize, seed: u64) -> Result<f64> {
    let (ab, ba) = both_directions(a, b, n, seed)?;
    Ok(ab.max.max(ba.max))
}

/// Mean of the two directed mean distances.
pub fn mean_distance(a: &HalfEdgeMesh, b: &HalfEdgeMesh, n: usize, seed: u64) -> Result<f64> {
    let (ab, ba) = both_directions(a, b, n, seed)?;
    Ok(0.5 * (ab.mean + ba.mean))
}
