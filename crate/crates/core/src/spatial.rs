//! Static 3-d tree for k-nearest-neighbor queries over point clouds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Point3;

/// Balanced k-d tree stored implicitly: the node for a slice of `order` is its
/// middle element, split on `depth % 3`.
#[derive(Clone, Debug)]
pub struct KdTree<'a> {
    points: &'a [Point3<f64>],
    order: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    dist2: f64,
    idx: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2.total_cmp(&other.dist2).then(self.idx.cmp(&other.idx))
    }
}

impl<'a> KdTree<'a> {
    pub fn build(points: &'a [Point3<f64>]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        Self::build_rec(points, &mut order, 0);
        Self { points, order }
    }

    fn build_rec(points: &[Point3<f64>], slice: &mut [usize], depth: usize) {
        if slice.len() <= 1 {
            return;
        }
        let axis = depth % 3;
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| points[a][axis].total_cmp(&points[b][axis]).then(a.cmp(&b)));
        let (left, right) = slice.split_at_mut(mid);
        Self::build_rec(points, left, depth + 1);
        Self::build_rec(points, &mut right[1..], depth + 1);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &'a [Point3<f64>] {
        self.points
    }

    /// Indices of the `k` points nearest to `query`, closest first. Distance
    /// ties are broken by index.
    pub fn nearest(&self, query: &Point3<f64>, k: usize) -> Vec<usize> {
        if k == 0 {
            return Vec::new();
        }
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.search(query, k, 0, self.order.len(), 0, &mut heap);
        heap.into_sorted_vec().into_iter().map(|c| c.idx).collect()
    }

    fn search(&self, q: &Point3<f64>, k: usize, lo: usize, hi: usize, depth: usize, heap: &mut BinaryHeap<Candidate>) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let idx = self.order[mid];
        let p = &self.points[idx];
        let cand = Candidate {
            dist2: (p - q).norm_squared(),
            idx,
        };
        if heap.len() < k {
            heap.push(cand);
        } else if cand < *heap.peek().expect("heap holds k items") {
            heap.pop();
            heap.push(cand);
        }

        let axis = depth % 3;
        let diff = q[axis] - p[axis];
        let (near, far) = if diff < 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.search(q, k, near.0, near.1, depth + 1, heap);
        let worst = heap.peek().map_or(f64::INFINITY, |c| c.dist2);
        if heap.len() < k || diff * diff <= worst {
            self.search(q, k, far.0, far.1, depth + 1, heap);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(points: &[Point3<f64>], q: &Point3<f64>, k: usize) -> Vec<usize> {
        let mut all: Vec<Candidate> = points
            .iter()
            .enumerate()
            .map(|(idx, p)| Candidate {
                dist2: (p - q).norm_squared(),
                idx,
            })
            .collect();
        all.sort();
        all.into_iter().take(k).map(|c| c.idx).collect()
    }

    #[test]
    fn empty_tree() {
        let pts: Vec<Point3<f64>> = Vec::new();
        let t = KdTree::build(&pts);
        assert!(t.nearest(&Point3::origin(), 3).is_empty());
    }

    #[test]
    fn duplicate_points_tie_by_index() {
        let pts = vec![Point3::new(1.0, 1.0, 1.0); 5];
        let t = KdTree::build(&pts);
        assert_eq!(t.nearest(&Point3::origin(), 3), vec![0, 1, 2]);
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            raw in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64, 0.0..2.0f64), 1..200),
            q in (-12.0..12.0f64, -12.0..12.0f64, -1.0..3.0f64),
            k in 1usize..60,
        ) {
            let pts: Vec<Point3<f64>> = raw.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
            let q = Point3::new(q.0, q.1, q.2);
            let t = KdTree::build(&pts);
            prop_assert_eq!(t.nearest(&q, k), brute(&pts, &q, k));
        }
    }
}
