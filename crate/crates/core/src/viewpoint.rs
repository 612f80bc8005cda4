//! Candidate viewpoints: sampling, gain, the three cost terms, utility and
//! refinement of clustered candidates.

use nalgebra::Point2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::frontier::{cluster_frontiers, FrontierSet};
use crate::subregion::{Bounds, EnclosedRegion};
use crate::world::{line_of_sight, walk_ray, Cell, GridMap, RobotState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViewpointKind {
    Local,
    /// Stand-in for a frontier cluster outside the planning horizon.
    GlobalPseudo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Viewpoint {
    pub position: Point2<f64>,
    /// Visible frontier cells; fractional after refinement averages gains.
    pub gain: f64,
    /// `c_r`, meters.
    pub region_cost: f64,
    /// `c_l`, meters.
    pub path_cost: f64,
    /// `c_d`, radians.
    pub direction_cost: f64,
    pub total_cost: f64,
    pub utility: f64,
    pub kind: ViewpointKind,
}

impl Viewpoint {
    /// Viewpoint with all costs zero and utility equal to the gain.
    pub fn new(position: Point2<f64>, gain: f64, kind: ViewpointKind) -> Self {
        Self {
            position,
            gain,
            region_cost: 0.0,
            path_cost: 0.0,
            direction_cost: 0.0,
            total_cost: 0.0,
            utility: gain,
            kind,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub w_r: f64,
    pub w_l: f64,
    pub w_d: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self { w_r: 0.3, w_l: 0.1, w_d: 0.2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewpointParams {
    /// Positions drawn per cycle (`K`).
    pub samples: usize,
    /// Every cell within this Chebyshev radius of a sample must be free.
    pub clearance: usize,
    /// Sensor range used for gain, meters.
    pub range: f64,
    /// Single-linkage radius for frontier clusters, meters.
    pub cluster_linkage: f64,
}

impl Default for ViewpointParams {
    fn default() -> Self {
        Self {
            samples: 100,
            clearance: 1,
            range: 15.0,
            cluster_linkage: 3.0,
        }
    }
}

/// Frontier cells around `p` that a scan from `p` would push back: a cell
/// counts when a ray from `p` toward one of its `Unknown` 4-neighbors
/// reaches unknown space within `range` without crossing an occupied cell.
pub fn information_gain(map: &GridMap, frontiers: &FrontierSet, p: Point2<f64>, range: f64) -> usize {
    observed_frontiers(map, frontiers, p, range).count()
}

/// The frontier cells counted by [`information_gain`], in set order.
pub fn observed_frontiers<'a>(map: &'a GridMap, frontiers: &'a FrontierSet, p: Point2<f64>, range: f64) -> impl Iterator<Item = usize> + 'a {
    let reach2 = (range + map.resolution()).powi(2);
    frontiers
        .iter()
        .filter(move |&f| (map.center(f) - p).norm_squared() <= reach2 && observable(map, f, p, range))
}

/// Whether a ray from `p` toward an unknown neighbor of `cell` enters
/// unknown space before `range` without first meeting an occupied cell.
pub fn observable(map: &GridMap, cell: usize, p: Point2<f64>, range: f64) -> bool {
    map.neighbors4(cell).filter(|&u| map.get(u) == Cell::Unknown).any(|u| {
        let to = map.center(u) - p;
        let dist = to.norm();
        if dist < 1e-12 {
            return true;
        }
        let mut hit = false;
        walk_ray(map, p, to / dist, range.min(dist + map.resolution()), |c, _| match map.get(c) {
            Cell::Free => true,
            Cell::Unknown => {
                hit = true;
                false
            }
            Cell::Occupied => false,
        });
        hit
    })
}

fn has_clearance(map: &GridMap, cell: usize, clearance: usize) -> bool {
    let (x, y) = map.coords(cell);
    let r = clearance as isize;
    for dy in -r..=r {
        for dx in -r..=r {
            let (Some(nx), Some(ny)) = (x.checked_add_signed(dx), y.checked_add_signed(dy)) else {
                return false;
            };
            if nx >= map.width() || ny >= map.height() || !map.is_free(map.index(nx, ny)) {
                return false;
            }
        }
    }
    true
}

/// Free cell whose center is closest to `p`; ties go to the lower index.
/// `hint` must be a free cell and bounds the search.
fn nearest_free_cell(map: &GridMap, p: Point2<f64>, hint: usize) -> usize {
    let res = map.resolution();
    let reach = (map.center(hint) - p).norm();
    let span = (reach / res).ceil() as isize + 1;
    let cx = (p.x / res).floor() as isize;
    let cy = (p.y / res).floor() as isize;
    let mut best = (reach * reach, hint);
    for y in (cy - span).max(0)..=(cy + span).min(map.height() as isize - 1) {
        for x in (cx - span).max(0)..=(cx + span).min(map.width() as isize - 1) {
            let c = map.index(x as usize, y as usize);
            if map.is_free(c) {
                let d = (map.center(c) - p).norm_squared();
                if d < best.0 || (d == best.0 && c < best.1) {
                    best = (d, c);
                }
            }
        }
    }
    best.1
}

/// Samples local viewpoints inside `horizon` and appends one global
/// pseudo-viewpoint per frontier cluster whose centroid lies outside it or
/// that no sampled viewpoint observes.
///
/// Local candidates are drawn uniformly, with replacement, from the free
/// cells inside the horizon that satisfy the clearance; duplicates and
/// candidates with zero gain are dropped. Costs are left at zero.
pub fn generate_viewpoints(map: &GridMap, frontiers: &FrontierSet, horizon: &Bounds, params: &ViewpointParams, seed: u64) -> Vec<Viewpoint> {
    let mut out = Vec::new();
    if frontiers.is_empty() {
        return out;
    }
    let res = map.resolution();
    let x_lo = (horizon.x_min / res).floor().max(0.0) as usize;
    let y_lo = (horizon.y_min / res).floor().max(0.0) as usize;
    let x_hi = ((horizon.x_max / res).ceil().max(0.0) as usize).min(map.width());
    let y_hi = ((horizon.y_max / res).ceil().max(0.0) as usize).min(map.height());
    let mut eligible = Vec::new();
    for y in y_lo..y_hi {
        for x in x_lo..x_hi {
            let c = map.index(x, y);
            if map.is_free(c) && horizon.contains(&map.center(c)) && has_clearance(map, c, params.clearance) {
                eligible.push(c);
            }
        }
    }

    let mut covered = std::collections::HashSet::new();
    if !eligible.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked: Vec<usize> = (0..params.samples).map(|_| eligible[rng.gen_range(0..eligible.len())]).collect();
        let mut seen = std::collections::HashSet::new();
        picked.retain(|c| seen.insert(*c));
        for c in picked {
            let p = map.center(c);
            let mut gain = 0;
            for f in observed_frontiers(map, frontiers, p, params.range) {
                covered.insert(f);
                gain += 1;
            }
            if gain > 0 {
                out.push(Viewpoint::new(p, gain as f64, ViewpointKind::Local));
            }
        }
    }

    for cluster in cluster_frontiers(frontiers, map, params.cluster_linkage) {
        if horizon.contains(&cluster.centroid) && cluster.cells.iter().any(|c| covered.contains(c)) {
            continue;
        }
        let hint = *cluster
            .cells
            .iter()
            .min_by(|&&a, &&b| {
                let da = (map.center(a) - cluster.centroid).norm_squared();
                let db = (map.center(b) - cluster.centroid).norm_squared();
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .expect("clusters are non-empty");
        let cell = nearest_free_cell(map, cluster.centroid, hint);
        out.push(Viewpoint::new(map.center(cell), cluster.cells.len() as f64, ViewpointKind::GlobalPseudo));
    }
    out
}

/// `c_r`: zero inside any alive region box or when none is alive, otherwise
/// the distance to the nearest alive region center.
pub fn subregion_cost(position: Point2<f64>, regions: &[EnclosedRegion]) -> f64 {
    let mut alive = regions.iter().filter(|r| r.alive).peekable();
    if alive.peek().is_none() {
        return 0.0;
    }
    let mut nearest = f64::INFINITY;
    for r in alive {
        if r.bounds.contains(&position) {
            return 0.0;
        }
        nearest = nearest.min((r.center() - position).norm());
    }
    nearest
}

/// `c_d`: angle between the current velocity and the heading toward the
/// viewpoint, in `[0, π]`. Zero when the robot is at rest or already there.
pub fn direction_cost(state: &RobotState, position: Point2<f64>) -> f64 {
    let to_vp = position - state.position;
    let v = state.velocity;
    if v.norm() < 1e-6 || to_vp.norm() < 1e-6 {
        return 0.0;
    }
    let cos = (v.dot(&to_vp) / (v.norm() * to_vp.norm())).clamp(-1.0, 1.0);
    cos.acos()
}

/// Sets `total_cost` and `utility` from the three cost terms.
pub fn total_cost_and_utility(v: &Viewpoint, weights: &CostWeights) -> Viewpoint {
    let total_cost = weights.w_r * v.region_cost + weights.w_l * v.path_cost + weights.w_d * v.direction_cost;
    Viewpoint {
        total_cost,
        utility: v.gain * (-total_cost).exp(),
        ..*v
    }
}

/// Merges mutually visible local viewpoints within `d_thr` of each other.
///
/// Viewpoints are visited in input order. Each unmerged local viewpoint
/// gathers the later-or-earlier unmerged local viewpoints within `d_thr`
/// that it can see, keeping a candidate only if it also sees every member
/// already kept. A non-empty group is replaced by one viewpoint at the
/// group centroid carrying the mean gain, unless the centroid cell is not
/// free. Global pseudo-viewpoints pass through unchanged. Costs of the
/// output are reset and must be recomputed.
pub fn refine_viewpoints(vps: &[Viewpoint], d_thr: f64, map: &GridMap) -> Vec<Viewpoint> {
    let mut merged = vec![false; vps.len()];
    let mut out = Vec::with_capacity(vps.len());
    for i in 0..vps.len() {
        if merged[i] {
            continue;
        }
        let vi = &vps[i];
        if vi.kind == ViewpointKind::GlobalPseudo {
            merged[i] = true;
            out.push(*vi);
            continue;
        }
        let mut group = vec![i];
        for j in 0..vps.len() {
            if j == i || merged[j] || vps[j].kind != ViewpointKind::Local {
                continue;
            }
            let pj = vps[j].position;
            if (pj - vi.position).norm() > d_thr {
                continue;
            }
            if group.iter().all(|&g| line_of_sight(map, vps[g].position, pj)) {
                group.push(j);
            }
        }
        merged[i] = true;
        if group.len() == 1 {
            out.push(Viewpoint::new(vi.position, vi.gain, vi.kind));
            continue;
        }
        let k = group.len() as f64;
        let centroid = Point2::from(group.iter().map(|&g| vps[g].position.coords).sum::<nalgebra::Vector2<f64>>() / k);
        if !map.cell_at(centroid).is_some_and(|c| map.is_free(c)) {
            out.push(Viewpoint::new(vi.position, vi.gain, vi.kind));
            continue;
        }
        let gain = group.iter().map(|&g| vps[g].gain).sum::<f64>() / k;
        for &g in &group {
            merged[g] = true;
        }
        out.push(Viewpoint::new(centroid, gain, ViewpointKind::Local));
    }
    out
}
