//! Asymmetric TSP over the robot node and the viewpoints.

use serde::{Deserialize, Serialize};

use super::astar::DistanceField;
use crate::error::{Error, Result};
use crate::viewpoint::{CostWeights, Viewpoint};
use crate::world::GridMap;

/// Largest instance [`brute_force_atsp`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Instances up to this many nodes are solved exactly by [`solve_atsp`].
pub const EXACT_LIMIT: usize = 13;

/// Dense row-major square matrix; entry `(i, j)` is the cost of going from
/// node `i` to node `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("cost matrix must be square".into()));
        }
        Ok(Self { n, data: rows.concat() })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TourSolution {
    /// Node sequence starting with the robot node 0.
    pub order: Vec<usize>,
    /// Sum of matrix entries along `order`, including the closing edge back
    /// to node 0.
    pub total_cost: f64,
}

/// Cost of visiting `order` and returning to its first node.
pub fn tour_cost(m: &CostMatrix, order: &[usize]) -> f64 {
    if order.is_empty() {
        return 0.0;
    }
    let legs: f64 = order.windows(2).map(|w| m.get(w[0], w[1])).sum();
    legs + m.get(order[order.len() - 1], order[0])
}

/// Node 0 is the robot. Leaving the robot toward viewpoint `i` costs its
/// `total_cost`; travel between viewpoints costs `w_l` times the grid path
/// length; returning to the robot is free, which makes the tour open.
pub fn build_atsp_matrix(vps: &[Viewpoint], map: &GridMap, weights: &CostWeights) -> Result<CostMatrix> {
    let n = vps.len() + 1;
    let mut m = CostMatrix::zeros(n);
    let cells = vps.iter().map(|v| map.try_cell_at(v.position)).collect::<Result<Vec<_>>>()?;
    for (i, v) in vps.iter().enumerate() {
        m.set(0, i + 1, v.total_cost);
        let field = DistanceField::bounded(map, cells[i], &cells);
        for (j, &c) in cells.iter().enumerate() {
            if i != j {
                let len = field.length(c).ok_or(Error::Unreachable)?;
                m.set(i + 1, j + 1, weights.w_l * len);
            }
        }
    }
    Ok(m)
}

fn validate(m: &CostMatrix) -> Result<()> {
    if m.len() < 2 {
        return Err(Error::InvalidArgument(format!("ATSP needs at least 2 nodes, got {}", m.len())));
    }
    if (0..m.len()).any(|i| m.get(i, i) != 0.0) {
        return Err(Error::InvalidArgument("ATSP matrix diagonal must be zero".into()));
    }
    Ok(())
}

fn nearest_neighbor(m: &CostMatrix, first: usize) -> Vec<usize> {
    let n = m.len();
    let mut visited = vec![false; n];
    let mut order = vec![0, first];
    visited[0] = true;
    visited[first] = true;
    while order.len() < n {
        let last = order[order.len() - 1];
        let next = (0..n)
            .filter(|&j| !visited[j])
            .min_by(|&a, &b| m.get(last, a).total_cmp(&m.get(last, b)).then(a.cmp(&b)))
            .expect("unvisited node remains");
        visited[next] = true;
        order.push(next);
    }
    order
}

/// Relative slack below which a move does not count as an improvement.
const IMPROVE_EPS: f64 = 1e-12;

/// Or-opt followed by 2-opt until neither finds a strictly better tour.
/// `trace` receives the cost after every accepted move.
fn improve(m: &CostMatrix, order: &mut Vec<usize>, trace: &mut dyn FnMut(f64)) {
    let n = order.len();
    let mut cost = tour_cost(m, order);
    let mut candidate = Vec::with_capacity(n);
    loop {
        let mut improved = false;

        // Or-opt: move a segment of 1..=3 nodes elsewhere, keeping its direction.
        'oropt: for len in 1..=3usize {
            for s in 1..n {
                if s + len > n {
                    break;
                }
                for p in 1..=(n - len) {
                    if p == s {
                        continue;
                    }
                    candidate.clear();
                    candidate.extend(order[..s].iter().chain(&order[s + len..]));
                    let segment = &order[s..s + len];
                    candidate.splice(p..p, segment.iter().copied());
                    let c = tour_cost(m, &candidate);
                    if c < cost - IMPROVE_EPS * cost.abs().max(1.0) {
                        std::mem::swap(order, &mut candidate);
                        cost = c;
                        trace(cost);
                        improved = true;
                        break 'oropt;
                    }
                }
            }
        }

        // 2-opt: reverse order[i..=j]; every reversed edge is re-priced.
        if !improved {
            'twoopt: for i in 1..n {
                for j in i + 1..n {
                    candidate.clear();
                    candidate.extend_from_slice(order);
                    candidate[i..=j].reverse();
                    let c = tour_cost(m, &candidate);
                    if c < cost - IMPROVE_EPS * cost.abs().max(1.0) {
                        std::mem::swap(order, &mut candidate);
                        cost = c;
                        trace(cost);
                        improved = true;
                        break 'twoopt;
                    }
                }
            }
        }

        if !improved {
            return;
        }
    }
}

/// Nearest-neighbor starts out of the robot node, tried in order of
/// departure cost.
const STARTS: usize = 8;

fn solve_traced(m: &CostMatrix, trace: &mut dyn FnMut(f64)) -> Result<TourSolution> {
    validate(m)?;
    let mut firsts: Vec<usize> = (1..m.len()).collect();
    firsts.sort_by(|&a, &b| m.get(0, a).total_cmp(&m.get(0, b)).then(a.cmp(&b)));
    firsts.truncate(STARTS);
    let mut best: Option<TourSolution> = None;
    for first in firsts {
        let mut order = nearest_neighbor(m, first);
        improve(m, &mut order, trace);
        let total_cost = tour_cost(m, &order);
        if best.as_ref().is_none_or(|b| total_cost < b.total_cost) {
            best = Some(TourSolution { order, total_cost });
        }
    }
    Ok(best.expect("at least one start"))
}

/// Tour from node 0: exact for up to [`EXACT_LIMIT`] nodes, otherwise
/// [`heuristic_atsp`].
pub fn solve_atsp(m: &CostMatrix) -> Result<TourSolution> {
    if m.len() <= EXACT_LIMIT {
        held_karp_atsp(m)
    } else {
        heuristic_atsp(m)
    }
}

/// Nearest-neighbor construction from several first hops, each improved by
/// Or-opt and asymmetric 2-opt; the cheapest result is returned.
pub fn heuristic_atsp(m: &CostMatrix) -> Result<TourSolution> {
    solve_traced(m, &mut |_| {})
}

/// Exact optimum by dynamic programming over subsets, `O(n² 2ⁿ)`. Ties keep
/// the first predecessor in index order.
pub fn held_karp_atsp(m: &CostMatrix) -> Result<TourSolution> {
    validate(m)?;
    let n = m.len();
    if n > 24 {
        return Err(Error::InvalidArgument(format!("Held-Karp refuses {n} nodes")));
    }
    // node k >= 1 is bit k - 1
    let k = n - 1;
    let full = (1usize << k) - 1;
    let mut cost = vec![f64::INFINITY; (full + 1) * k];
    let mut parent = vec![usize::MAX; (full + 1) * k];
    for j in 0..k {
        cost[(1 << j) * k + j] = m.get(0, j + 1);
    }
    for mask in 1..=full {
        for j in 0..k {
            let here = cost[mask * k + j];
            if mask & (1 << j) == 0 || here == f64::INFINITY {
                continue;
            }
            for next in 0..k {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let to = mask | (1 << next);
                let c = here + m.get(j + 1, next + 1);
                if c < cost[to * k + next] {
                    cost[to * k + next] = c;
                    parent[to * k + next] = j;
                }
            }
        }
    }
    let (mut last, mut best) = (0, f64::INFINITY);
    for j in 0..k {
        let c = cost[full * k + j] + m.get(j + 1, 0);
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut j = last;
    loop {
        order.push(j + 1);
        let p = parent[mask * k + j];
        mask &= !(1 << j);
        if p == usize::MAX {
            break;
        }
        j = p;
    }
    order.push(0);
    order.reverse();
    let total_cost = tour_cost(m, &order);
    Ok(TourSolution { order, total_cost })
}

/// Exact optimum by enumerating every order of nodes `1..n`. The
/// lexicographically first order wins ties.
pub fn brute_force_atsp(m: &CostMatrix) -> Result<TourSolution> {
    validate(m)?;
    if m.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "brute force refuses {} nodes (limit {BRUTE_FORCE_LIMIT})",
            m.len()
        )));
    }
    fn rec(m: &CostMatrix, order: &mut Vec<usize>, used: &mut [bool], acc: f64, best: &mut TourSolution) {
        let n = m.len();
        let last = order[order.len() - 1];
        if order.len() == n {
            let total = acc + m.get(last, 0);
            if total < best.total_cost {
                best.total_cost = total;
                best.order.clone_from(order);
            }
            return;
        }
        for j in 1..n {
            if !used[j] {
                used[j] = true;
                order.push(j);
                rec(m, order, used, acc + m.get(last, j), best);
                order.pop();
                used[j] = false;
            }
        }
    }
    let mut best = TourSolution {
        order: Vec::new(),
        total_cost: f64::INFINITY,
    };
    let mut used = vec![false; m.len()];
    used[0] = true;
    rec(m, &mut vec![0], &mut used, 0.0, &mut best);
    Ok(best)
}
