//! Synthetic meshes: polytopes, spheres, disks, tori, prisms, quad grids, and
//! small hand-built patches reproducing the configurations the edit guards
//! are designed to block.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::fan_triangulate;
use crate::mesh::{EdgeId, HalfEdgeMesh, Vec3, VertexId};

fn build(positions: Vec<Vec3>, triangles: &[[usize; 3]]) -> HalfEdgeMesh {
    HalfEdgeMesh::build(positions, triangles).expect("generated shape is manifold")
}

fn v(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

/// Unit equilateral triangle in the z = 0 plane, counter-clockwise.
pub fn single_triangle() -> HalfEdgeMesh {
    build(
        vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.5, 3f64.sqrt() / 2.0, 0.0)],
        &[[0, 1, 2]],
    )
}

pub fn tetrahedron() -> HalfEdgeMesh {
    build(
        vec![v(1.0, 1.0, 1.0), v(1.0, -1.0, -1.0), v(-1.0, 1.0, -1.0), v(-1.0, -1.0, 1.0)],
        &[[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    )
}

pub fn octahedron() -> HalfEdgeMesh {
    let p = vec![
        v(1.0, 0.0, 0.0),
        v(-1.0, 0.0, 0.0),
        v(0.0, 1.0, 0.0),
        v(0.0, -1.0, 0.0),
        v(0.0, 0.0, 1.0),
        v(0.0, 0.0, -1.0),
    ];
    let t = [
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    build(p, &t)
}

fn icosahedron_raw() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let p: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| v(x, y, z).normalize())
    .collect();
    let t = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (p, t)
}

/// Regular icosahedron inscribed in the unit sphere.
pub fn icosahedron() -> HalfEdgeMesh {
    let (p, t) = icosahedron_raw();
    build(p, &t)
}

/// Geodesic unit sphere: every icosahedron face is cut into `frequency²`
/// triangles and the lattice points are pushed onto the sphere.
/// V = 10·f² + 2, F = 20·f².
pub fn geodesic_sphere(frequency: usize) -> HalfEdgeMesh {
    let n = frequency.max(1);
    let (base, faces) = icosahedron_raw();
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut positions = Vec::new();
    let mut triangles = Vec::with_capacity(20 * n * n);

    for tri in &faces {
        let mut local = HashMap::new();
        for i in 0..=n {
            for j in 0..=(n - i) {
                let w = [(tri[0], n - i - j), (tri[1], i), (tri[2], j)];
                let mut key: Vec<(usize, usize)> = w.iter().copied().filter(|&(_, k)| k > 0).collect();
                key.sort();
                let id = *index.entry(key).or_insert_with(|| {
                    let p: Vec3 = w.iter().map(|&(c, k)| base[c] * k as f64).sum::<Vec3>() / n as f64;
                    positions.push(p.normalize());
                    positions.len() - 1
                });
                local.insert((i, j), id);
            }
        }
        for i in 0..n {
            for j in 0..(n - i) {
                triangles.push([local[&(i, j)], local[&(i + 1, j)], local[&(i, j + 1)]]);
                if i + j + 2 <= n {
                    triangles.push([local[&(i + 1, j)], local[&(i + 1, j + 1)], local[&(i, j + 1)]]);
                }
            }
        }
    }
    build(positions, &triangles)
}

/// Icosphere with `subdivisions` levels of 1-to-4 refinement
/// (frequency 2^subdivisions).
pub fn icosphere(subdivisions: u32) -> HalfEdgeMesh {
    geodesic_sphere(1 << subdivisions)
}

/// Geodesic sphere whose vertices are jittered by up to `amplitude` times the
/// lattice spacing and pushed back onto the unit sphere.
pub fn perturbed_sphere(frequency: usize, amplitude: f64, seed: u64) -> HalfEdgeMesh {
    let mut m = geodesic_sphere(frequency);
    let h = m.average_edge_length().unwrap_or(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<VertexId> = m.vertices().collect();
    for id in ids {
        let j = v(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let p = (m.position(id) + j * amplitude * h).normalize();
        m.set_position(id, p);
    }
    m
}

/// Hexagonal patch of the unit triangular lattice, `rings` hexagon rings
/// around the origin, in the z = 0 plane.
pub fn hex_patch(rings: usize, spacing: f64) -> HalfEdgeMesh {
    let r = rings as i64;
    let inside = |i: i64, j: i64| i.abs().max(j.abs()).max((i + j).abs()) <= r;
    let mut index = HashMap::new();
    let mut positions = Vec::new();
    for j in -r..=r {
        for i in -r..=r {
            if inside(i, j) {
                index.insert((i, j), positions.len());
                let x = (i as f64 + 0.5 * j as f64) * spacing;
                let y = j as f64 * 3f64.sqrt() / 2.0 * spacing;
                positions.push(v(x, y, 0.0));
            }
        }
    }
    let mut triangles = Vec::new();
    for j in -r..=r {
        for i in -r..=r {
            let get = |a: i64, b: i64| index.get(&(a, b)).copied();
            if let (Some(p), Some(q), Some(s)) = (get(i, j), get(i + 1, j), get(i, j + 1)) {
                triangles.push([p, q, s]);
            }
            if let (Some(p), Some(q), Some(s)) = (get(i + 1, j), get(i + 1, j + 1), get(i, j + 1)) {
                triangles.push([p, q, s]);
            }
        }
    }
    build(positions, &triangles)
}

/// Planar disk made of concentric rings; ring `k` carries `growth·k`
/// vertices, so triangles are less regular than in [`hex_patch`].
pub fn polar_disk(rings: usize, growth: usize, radius: f64) -> HalfEdgeMesh {
    let mut positions = vec![v(0.0, 0.0, 0.0)];
    let mut ring_ids: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..=rings {
        let count = growth * k;
        let r = radius * k as f64 / rings as f64;
        let offset = if k % 2 == 0 { 0.5 } else { 0.0 };
        let ids = (0..count)
            .map(|i| {
                let t = std::f64::consts::TAU * (i as f64 + offset) / count as f64;
                positions.push(v(r * t.cos(), r * t.sin(), 0.0));
                positions.len() - 1
            })
            .collect();
        ring_ids.push(ids);
    }
    let angle = |p: Vec3| p.y.atan2(p.x).rem_euclid(std::f64::consts::TAU);
    let mut triangles = Vec::new();
    let first = &ring_ids[1];
    for i in 0..first.len() {
        triangles.push([0, first[i], first[(i + 1) % first.len()]]);
    }
    for k in 2..=rings {
        let inner = &ring_ids[k - 1];
        let outer = &ring_ids[k];
        // merge the two rings by angle, walking once around
        let (mut a, mut b) = (0usize, 0usize);
        let inner_angle = |i: usize| angle(positions[inner[i % inner.len()]]) + if i >= inner.len() { std::f64::consts::TAU } else { 0.0 };
        let outer_angle = |i: usize| angle(positions[outer[i % outer.len()]]) + if i >= outer.len() { std::f64::consts::TAU } else { 0.0 };
        while a < inner.len() || b < outer.len() {
            let advance_outer = b < outer.len() && (a >= inner.len() || outer_angle(b + 1) <= inner_angle(a + 1));
            if advance_outer {
                triangles.push([inner[a % inner.len()], outer[b % outer.len()], outer[(b + 1) % outer.len()]]);
                b += 1;
            } else {
                triangles.push([inner[a % inner.len()], outer[b % outer.len()], inner[(a + 1) % inner.len()]]);
                a += 1;
            }
        }
    }
    build(positions, &triangles)
}

/// Torus around the z axis with `nu` segments along the tube path and `nv`
/// around the tube.
pub fn torus(nu: usize, nv: usize, major: f64, minor: f64) -> HalfEdgeMesh {
    let mut positions = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = std::f64::consts::TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let w = std::f64::consts::TAU * j as f64 / nv as f64;
            let rr = major + minor * w.cos();
            positions.push(v(rr * u.cos(), rr * u.sin(), minor * w.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut triangles = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    build(positions, &triangles)
}

/// Closed regular prism with `sides` flat walls. Each wall edge is cut into
/// `segments`, the height into `rows`, and the caps are fans around their
/// centres. Wall normals of neighbouring sides differ by 360°/`sides`.
pub fn prism(sides: usize, segments: usize, rows: usize, radius: f64, height: f64) -> HalfEdgeMesh {
    let corners: Vec<Vec3> = (0..sides)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / sides as f64;
            v(radius * t.cos(), radius * t.sin(), 0.0)
        })
        .collect();
    let mut rim = Vec::with_capacity(sides * segments);
    for k in 0..sides {
        let (p, q) = (corners[k], corners[(k + 1) % sides]);
        for s in 0..segments {
            rim.push(p + (q - p) * (s as f64 / segments as f64));
        }
    }
    let n = rim.len();
    let mut positions = Vec::with_capacity(n * (rows + 1) + 2);
    for r in 0..=rows {
        let z = height * r as f64 / rows as f64;
        positions.extend(rim.iter().map(|p| v(p.x, p.y, z)));
    }
    let bottom = positions.len();
    positions.push(v(0.0, 0.0, 0.0));
    let top = positions.len();
    positions.push(v(0.0, 0.0, height));

    let id = |r: usize, k: usize| r * n + k % n;
    let mut triangles = Vec::new();
    for r in 0..rows {
        for k in 0..n {
            triangles.push([id(r, k), id(r, k + 1), id(r + 1, k + 1)]);
            triangles.push([id(r, k), id(r + 1, k + 1), id(r + 1, k)]);
        }
    }
    for k in 0..n {
        triangles.push([bottom, id(0, k + 1), id(0, k)]);
        triangles.push([top, id(rows, k), id(rows, k + 1)]);
    }
    build(positions, &triangles)
}

/// Planar grid of `nx` × `ny` quads, each fan-triangulated at its first
/// corner the way a polygon-face OBJ is imported.
pub fn fan_quad_grid(nx: usize, ny: usize, dx: f64, dy: f64) -> HalfEdgeMesh {
    let mut positions = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            positions.push(v(i as f64 * dx, j as f64 * dy, 0.0));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let quads: Vec<Vec<usize>> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]))
        .collect();
    build(positions, &fan_triangulate(&quads))
}

// ---- guard fixtures -----------------------------------------------------

/// Long edge from (0,0,0) to (2,0,0) whose two opposite angles are both 120°.
pub fn obtuse_split_fixture() -> (HalfEdgeMesh, EdgeId) {
    let h = 1.0 / 60f64.to_radians().tan();
    split_fixture(v(1.0, h, 0.0), v(1.0, -h, 0.0), 2.0)
}

/// Edge of length 1.5 between two acute triangles.
pub fn acute_split_fixture() -> (HalfEdgeMesh, EdgeId) {
    split_fixture(v(0.75, 1.3, 0.0), v(0.75, -1.3, 0.0), 1.5)
}

fn split_fixture(top: Vec3, bottom: Vec3, length: f64) -> (HalfEdgeMesh, EdgeId) {
    let m = build(
        vec![v(0.0, 0.0, 0.0), v(length, 0.0, 0.0), top, bottom],
        &[[0, 1, 2], [1, 0, 3]],
    );
    let e = m.find_edge(VertexId(0), VertexId(1)).unwrap();
    (m, e)
}

/// Interior edge of length 0.5 whose endpoints have degrees 5 and 6.
pub fn degree_collapse_fixture() -> (HalfEdgeMesh, EdgeId) {
    let p = vec![
        v(-0.25, 0.0, 0.0), // 0 a
        v(0.25, 0.0, 0.0),  // 1 b
        v(0.0, 1.0, 0.0),   // 2 c
        v(0.0, -1.0, 0.0),  // 3 d
        v(-1.0, 0.6, 0.0),  // 4 x1
        v(-1.0, -0.6, 0.0), // 5 x2
        v(1.0, -0.8, 0.0),  // 6 y1
        v(1.2, 0.0, 0.0),   // 7 y2
        v(1.0, 0.8, 0.0),   // 8 y3
    ];
    let t = [
        [0, 1, 2],
        [0, 2, 4],
        [0, 4, 5],
        [0, 5, 3],
        [0, 3, 1],
        [1, 7, 8],
        [1, 8, 2],
        [1, 3, 6],
        [1, 6, 7],
    ];
    let m = build(p, &t);
    let e = m.find_edge(VertexId(0), VertexId(1)).unwrap();
    (m, e)
}

/// Interior edge of length 0.5 with two degree-4 endpoints inside a diamond.
pub fn diamond_collapse_fixture() -> (HalfEdgeMesh, EdgeId) {
    let p = vec![
        v(-0.25, 0.0, 0.0), // a
        v(0.25, 0.0, 0.0),  // b
        v(0.0, 0.5, 0.0),   // c
        v(0.0, -0.5, 0.0),  // d
        v(-0.7, 0.0, 0.0),  // x
        v(0.7, 0.0, 0.0),   // y
    ];
    let t = [[0, 1, 2], [0, 2, 4], [0, 4, 3], [0, 3, 1], [1, 5, 2], [1, 3, 5]];
    let m = build(p, &t);
    let e = m.find_edge(VertexId(0), VertexId(1)).unwrap();
    (m, e)
}

/// Planar patch around the edge a–b (a = (−`half_ab`, 0), b = (`half_ab`, 0))
/// with opposite vertices c = (0, `half_cd`) and d = (0, −`half_cd`).
/// Degrees are a = b = 7 and c = d = 5, all interior, so flipping a–b to c–d
/// brings all four to 6. `lift_deg` rotates c about the a–b axis, setting
/// the dihedral angle between the two faces of the edge.
pub fn valence_flip_fixture(half_ab: f64, half_cd: f64, lift_deg: f64) -> (HalfEdgeMesh, EdgeId) {
    let t = lift_deg.to_radians();
    let p = vec![
        v(-half_ab, 0.0, 0.0),                      // 0 a
        v(half_ab, 0.0, 0.0),                       // 1 b
        v(0.0, half_cd * t.cos(), half_cd * t.sin()), // 2 c
        v(0.0, -half_cd, 0.0),                      // 3 d
        v(0.0, 2.0, 0.0),                           // 4 top
        v(0.0, -2.0, 0.0),                          // 5 bottom
        v(-1.2, 1.3, 0.0),                          // 6 l1
        v(-1.9, 0.6, 0.0),                          // 7 l2
        v(-1.9, -0.6, 0.0),                         // 8 l3
        v(-1.2, -1.3, 0.0),                         // 9 l4
        v(1.2, 1.3, 0.0),                           // 10 r1
        v(1.9, 0.6, 0.0),                           // 11 r2
        v(1.9, -0.6, 0.0),                          // 12 r3
        v(1.2, -1.3, 0.0),                          // 13 r4
    ];
    let (a, b, c, d, top, bot) = (0, 1, 2, 3, 4, 5);
    let (l1, l2, l3, l4) = (6, 7, 8, 9);
    let (r1, r2, r3, r4) = (10, 11, 12, 13);
    let tris = [
        [a, b, c],
        [a, c, l1],
        [a, l1, l2],
        [a, l2, l3],
        [a, l3, l4],
        [a, l4, d],
        [a, d, b],
        [b, d, r4],
        [b, r4, r3],
        [b, r3, r2],
        [b, r2, r1],
        [b, r1, c],
        [c, r1, top],
        [c, top, l1],
        [d, l4, bot],
        [d, bot, r4],
    ];
    let m = build(p, &tris);
    let e = m.find_edge(VertexId(a), VertexId(b)).unwrap();
    (m, e)
}
