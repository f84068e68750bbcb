use crate::mesh::Vec3;

const LEAF_SIZE: usize = 4;

/// Closest point to `p` on triangle `abc` (Voronoi-region walk).
pub fn closest_point_on_triangle(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = va + vb + vc;
    if denom == 0.0 {
        // zero-area triangle that slipped past the edge tests
        return [a, b, c]
            .into_iter()
            .min_by(|x, y| (p - x).norm_squared().total_cmp(&(p - y).norm_squared()))
            .unwrap();
    }
    let v = vb / denom;
    let w = vc / denom;
    a + ab * v + ac * w
}

#[derive(Clone, Copy, Debug)]
struct Aabb {
    lo: Vec3,
    hi: Vec3,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            lo: Vec3::repeat(f64::INFINITY),
            hi: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: Vec3) {
        self.lo = self.lo.inf(&p);
        self.hi = self.hi.sup(&p);
    }

    fn dist2(&self, p: Vec3) -> f64 {
        let d = (self.lo - p).sup(&(p - self.hi)).sup(&Vec3::zeros());
        d.norm_squared()
    }
}

#[derive(Clone, Debug)]
struct Node {
    bounds: Aabb,
    /// Leaf: range into `order`. Inner: `start` is the left child, `end` the right.
    start: usize,
    end: usize,
    leaf: bool,
}

/// Bounding-volume hierarchy over a fixed triangle list.
#[derive(Clone, Debug)]
pub struct TriangleBvh {
    triangles: Vec<[Vec3; 3]>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl TriangleBvh {
    pub fn new(triangles: Vec<[Vec3; 3]>) -> Self {
        let mut bvh = Self {
            order: (0..triangles.len()).collect(),
            triangles,
            nodes: Vec::new(),
        };
        if !bvh.triangles.is_empty() {
            let centroids: Vec<Vec3> = bvh
                .triangles
                .iter()
                .map(|t| (t[0] + t[1] + t[2]) / 3.0)
                .collect();
            bvh.build(0, bvh.triangles.len(), &centroids);
        }
        bvh
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    fn build(&mut self, start: usize, end: usize, centroids: &[Vec3]) -> usize {
        let mut bounds = Aabb::empty();
        let mut cbounds = Aabb::empty();
        for &i in &self.order[start..end] {
            for p in self.triangles[i] {
                bounds.grow(p);
            }
            cbounds.grow(centroids[i]);
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            bounds,
            start,
            end,
            leaf: true,
        });
        if end - start <= LEAF_SIZE {
            return id;
        }
        let ax = (cbounds.hi - cbounds.lo).imax();
        let mid = (start + end) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            centroids[a][ax].total_cmp(&centroids[b][ax]).then(a.cmp(&b))
        });
        let left = self.build(start, mid, centroids);
        let right = self.build(mid, end, centroids);
        self.nodes[id] = Node {
            bounds,
            start: left,
            end: right,
            leaf: false,
        };
        id
    }

    /// Closest surface point as `(distance, triangle index, point)`, or
    /// `None` for an empty hierarchy.
    pub fn closest(&self, p: Vec3) -> Option<(f64, usize, Vec3)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, usize::MAX, p);
        let mut stack = vec![(self.nodes[0].bounds.dist2(p), 0usize)];
        while let Some((d2, id)) = stack.pop() {
            if d2 > best.0 {
                continue;
            }
            let node = &self.nodes[id];
            if node.leaf {
                for &i in &self.order[node.start..node.end] {
                    let [a, b, c] = self.triangles[i];
                    let q = closest_point_on_triangle(p, a, b, c);
                    let dq = (q - p).norm_squared();
                    if dq < best.0 || (dq == best.0 && i < best.1) {
                        best = (dq, i, q);
                    }
                }
            } else {
                let dl = self.nodes[node.start].bounds.dist2(p);
                let dr = self.nodes[node.end].bounds.dist2(p);
                // push the farther child first so the nearer is popped next
                if dl <= dr {
                    stack.push((dr, node.end));
                    stack.push((dl, node.start));
                } else {
                    stack.push((dl, node.start));
                    stack.push((dr, node.end));
                }
            }
        }
        Some((best.0.sqrt(), best.1, best.2))
    }

    pub fn distance(&self, p: Vec3) -> f64 {
        self.closest(p).map_or(f64::INFINITY, |c| c.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    #[test]
    fn feature_regions() {
        let (a, b, c) = (v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0));
        let cases = [
            (v(0.2, 0.2, 3.0), v(0.2, 0.2, 0.0)),
            (v(-1.0, -1.0, 0.0), a),
            (v(2.0, -0.5, 0.0), b),
            (v(-0.5, 2.0, 0.0), c),
            (v(0.5, -2.0, 1.0), v(0.5, 0.0, 0.0)),
            (v(-3.0, 0.25, 0.0), v(0.0, 0.25, 0.0)),
            (v(1.0, 1.0, 0.0), v(0.5, 0.5, 0.0)),
        ];
        for (p, want) in cases {
            let q = closest_point_on_triangle(p, a, b, c);
            assert!((q - want).norm() < 1e-15, "{p:?} -> {q:?}");
        }
    }

    #[test]
    fn empty_bvh() {
        assert!(TriangleBvh::new(Vec::new()).closest(Vec3::zeros()).is_none());
    }

    // Oracle: project onto the plane and test barycentric containment,
    // otherwise take the best of the three clamped segment projections.
    fn oracle(p: Vec3, t: [Vec3; 3]) -> f64 {
        let n = (t[1] - t[0]).cross(&(t[2] - t[0]));
        if n.norm() > 1e-14 {
            let n = n.normalize();
            let h = (p - t[0]).dot(&n);
            let q = p - n * h;
            let inside = (0..3).all(|k| {
                (t[(k + 1) % 3] - t[k]).cross(&(q - t[k])).dot(&n) >= 0.0
            });
            if inside {
                return h.abs();
            }
        }
        (0..3)
            .map(|k| {
                let (s, e) = (t[k], t[(k + 1) % 3]);
                let d = e - s;
                let u = if d.norm_squared() == 0.0 { 0.0 } else { ((p - s).dot(&d) / d.norm_squared()).clamp(0.0, 1.0) };
                (p - (s + d * u)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    proptest! {
        #[test]
        fn single_triangle_matches_oracle(c in proptest::collection::vec(-2.0f64..2.0, 12)) {
            let t = [v(c[0], c[1], c[2]), v(c[3], c[4], c[5]), v(c[6], c[7], c[8])];
            let p = v(c[9], c[10], c[11]);
            let got = (closest_point_on_triangle(p, t[0], t[1], t[2]) - p).norm();
            prop_assert!((got - oracle(p, t)).abs() < 1e-9);
        }

        #[test]
        fn bvh_matches_exhaustive(c in proptest::collection::vec(-2.0f64..2.0, 9 * 30 + 3)) {
            let tris: Vec<[Vec3; 3]> = c[..270]
                .chunks(9)
                .map(|k| [v(k[0], k[1], k[2]), v(k[3], k[4], k[5]), v(k[6], k[7], k[8])])
                .collect();
            let p = v(c[270], c[271], c[272]);
            let bvh = TriangleBvh::new(tris.clone());
            let brute = tris.iter().map(|&t| oracle(p, t)).fold(f64::INFINITY, f64::min);
            prop_assert!((bvh.distance(p) - brute).abs() < 1e-9);
        }
    }
}
