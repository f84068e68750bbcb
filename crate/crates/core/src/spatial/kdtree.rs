use std::cmp::Ordering;

use crate::mesh::Vec3;

const LEAF_SIZE: usize = 8;

/// Static kd-tree stored implicitly: each subrange of `order` is split at its
/// midpoint along `axis[mid]`.
#[derive(Clone, Debug)]
pub struct KdTree {
    points: Vec<Vec3>,
    order: Vec<usize>,
    axis: Vec<u8>,
}

impl KdTree {
    pub fn new(points: Vec<Vec3>) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut axis = vec![0u8; points.len()];
        build(&points, &mut order, &mut axis);
        Self { points, order, axis }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Indices and squared distances of all points with `|p - q| <= r`,
    /// sorted by index.
    pub fn within_radius(&self, q: Vec3, r: f64) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        self.radius_rec(0, self.order.len(), q, r * r, &mut out);
        out.sort_unstable_by_key(|&(i, _)| i);
        out
    }

    fn radius_rec(&self, lo: usize, hi: usize, q: Vec3, r2: f64, out: &mut Vec<(usize, f64)>) {
        if hi - lo <= LEAF_SIZE {
            for &i in &self.order[lo..hi] {
                let d2 = (self.points[i] - q).norm_squared();
                if d2 <= r2 {
                    out.push((i, d2));
                }
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let i = self.order[mid];
        let ax = self.axis[mid] as usize;
        let d2 = (self.points[i] - q).norm_squared();
        if d2 <= r2 {
            out.push((i, d2));
        }
        let delta = q[ax] - self.points[i][ax];
        let (near, far) = if delta <= 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.radius_rec(near.0, near.1, q, r2, out);
        if delta * delta <= r2 {
            self.radius_rec(far.0, far.1, q, r2, out);
        }
    }

    /// Nearest point as `(index, distance)`; ties go to the lower index.
    pub fn nearest(&self, q: Vec3) -> Option<(usize, f64)> {
        self.knn(q, 1).into_iter().next()
    }

    /// The `k` nearest points as `(index, distance)`, closest first.
    pub fn knn(&self, q: Vec3, k: usize) -> Vec<(usize, f64)> {
        if k == 0 || self.is_empty() {
            return Vec::new();
        }
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        self.knn_rec(0, self.order.len(), q, k, &mut best);
        best.into_iter().map(|(d2, i)| (i, d2.sqrt())).collect()
    }

    fn knn_rec(&self, lo: usize, hi: usize, q: Vec3, k: usize, best: &mut Vec<(f64, usize)>) {
        let offer = |best: &mut Vec<(f64, usize)>, i: usize| {
            let cand = ((self.points[i] - q).norm_squared(), i);
            if best.len() == k && cmp_pair(&cand, best.last().unwrap()) != Ordering::Less {
                return;
            }
            let pos = best.partition_point(|b| cmp_pair(b, &cand) == Ordering::Less);
            best.insert(pos, cand);
            best.truncate(k);
        };
        if hi - lo <= LEAF_SIZE {
            for &i in &self.order[lo..hi] {
                offer(best, i);
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let i = self.order[mid];
        let ax = self.axis[mid] as usize;
        offer(best, i);
        let delta = q[ax] - self.points[i][ax];
        let (near, far) = if delta <= 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.knn_rec(near.0, near.1, q, k, best);
        if best.len() < k || delta * delta <= best.last().unwrap().0 {
            self.knn_rec(far.0, far.1, q, k, best);
        }
    }
}

fn cmp_pair(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

fn build(points: &[Vec3], order: &mut [usize], axis: &mut [u8]) {
    if order.len() <= LEAF_SIZE {
        return;
    }
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for &i in order.iter() {
        lo = lo.inf(&points[i]);
        hi = hi.sup(&points[i]);
    }
    let ax = (hi - lo).imax();
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        points[a][ax].total_cmp(&points[b][ax]).then(a.cmp(&b))
    });
    axis[mid] = ax as u8;
    let (left, right) = order.split_at_mut(mid);
    let (al, ar) = axis.split_at_mut(mid);
    build(points, left, al);
    build(points, &mut right[1..], &mut ar[1..]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(n: usize, seed: u64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn empty_tree() {
        let t = KdTree::new(Vec::new());
        assert!(t.nearest(Vec3::zeros()).is_none());
        assert!(t.within_radius(Vec3::zeros(), 1.0).is_empty());
    }

    #[test]
    fn duplicate_points_tie_to_lowest_index() {
        let t = KdTree::new(vec![Vec3::x(); 40]);
        assert_eq!(t.nearest(Vec3::zeros()).unwrap().0, 0);
        assert_eq!(t.within_radius(Vec3::x(), 0.0).len(), 40);
    }

    proptest! {
        #[test]
        fn queries_match_linear_scan(seed in 0u64..1000, n in 1usize..300, r in 0.05f64..1.0, k in 1usize..12) {
            let pts = cloud(n, seed);
            let t = KdTree::new(pts.clone());
            let q = cloud(1, seed ^ 0xdead)[0];

            let brute: Vec<usize> = (0..n).filter(|&i| (pts[i] - q).norm() <= r).collect();
            let got: Vec<usize> = t.within_radius(q, r).into_iter().map(|(i, _)| i).collect();
            prop_assert_eq!(got, brute);

            let mut all: Vec<(f64, usize)> = (0..n).map(|i| ((pts[i] - q).norm_squared(), i)).collect();
            all.sort_by(cmp_pair);
            let expect: Vec<usize> = all.iter().take(k).map(|p| p.1).collect();
            let got: Vec<usize> = t.knn(q, k).into_iter().map(|(i, _)| i).collect();
            prop_assert_eq!(got, expect);
        }
    }
}
