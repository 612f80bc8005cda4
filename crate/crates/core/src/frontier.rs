//! Frontier maintenance.
//!
//! A frontier cell is a known-`Free` cell with at least one `Unknown`
//! 4-neighbor. [`FrontierSet::update`] only looks at the cells a scan changed
//! and their 8-neighborhoods; [`full_scan_frontiers`] recomputes the set from
//! scratch and serves as the reference.

use std::collections::HashMap;

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::{Cell, GridMap};

const NOT_MEMBER: u32 = u32::MAX;

/// Cells examined by the most recent update and over the set's lifetime.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    pub last: u64,
    pub total: u64,
}

/// Frontier cells as a dense member list plus a per-cell slot table, so that
/// insert, remove and membership are O(1) and iteration order only depends
/// on the update history.
#[derive(Clone, Debug)]
pub struct FrontierSet {
    members: Vec<usize>,
    slot: Vec<u32>,
    workload: Workload,
}

impl FrontierSet {
    /// Empty set for a map with `cells` cells.
    pub fn new(cells: usize) -> Self {
        Self {
            members: Vec::new(),
            slot: vec![NOT_MEMBER; cells],
            workload: Workload::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.slot.get(cell).is_some_and(|&s| s != NOT_MEMBER)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// Members in ascending cell order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.members.clone();
        v.sort_unstable();
        v
    }

    pub fn workload(&self) -> Workload {
        self.workload
    }

    fn insert(&mut self, cell: usize) {
        if self.slot[cell] == NOT_MEMBER {
            self.slot[cell] = self.members.len() as u32;
            self.members.push(cell);
        }
    }

    fn remove(&mut self, cell: usize) {
        let s = self.slot[cell];
        if s == NOT_MEMBER {
            return;
        }
        let last = *self.members.last().expect("member list is non-empty");
        self.members.swap_remove(s as usize);
        if last != cell {
            self.slot[last] = s;
        }
        self.slot[cell] = NOT_MEMBER;
    }

    /// Brings the set up to date after a scan changed `newly_updated`.
    ///
    /// Newly free cells with an unknown 4-neighbor join the set, and current
    /// members in the 8-neighborhood of any changed cell are re-checked and
    /// dropped when they no longer qualify. Returns the number of cells
    /// examined: one per changed cell plus its in-bounds 8-neighbors.
    pub fn update(&mut self, map: &GridMap, newly_updated: &[usize]) -> Result<u64> {
        if map.len() != self.slot.len() {
            return Err(Error::InvalidArgument(format!(
                "frontier set sized for {} cells, map has {}",
                self.slot.len(),
                map.len()
            )));
        }
        if let Some(&bad) = newly_updated.iter().find(|&&c| c >= map.len()) {
            return Err(Error::IndexOutOfBounds(bad));
        }
        let mut examined = 0u64;
        for &cell in newly_updated {
            examined += 1;
            if is_frontier(map, cell) {
                self.insert(cell);
            }
            for n in map.neighbors8(cell) {
                examined += 1;
                if self.contains(n) && !is_frontier(map, n) {
                    self.remove(n);
                }
            }
        }
        self.workload.last = examined;
        self.workload.total += examined;
        Ok(examined)
    }
}

impl PartialEq for FrontierSet {
    /// Set equality; insertion order and workload counters are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.slot.len() == other.slot.len() && self.len() == other.len() && self.iter().all(|c| other.contains(c))
    }
}

/// Frontier rule: known free with at least one unknown 4-neighbor.
pub fn is_frontier(map: &GridMap, cell: usize) -> bool {
    map.get(cell) == Cell::Free && map.neighbors4(cell).any(|n| map.get(n) == Cell::Unknown)
}

/// Exhaustive frontier extraction over every cell of the map.
pub fn full_scan_frontiers(map: &GridMap) -> FrontierSet {
    let mut set = FrontierSet::new(map.len());
    for cell in 0..map.len() {
        if is_frontier(map, cell) {
            set.insert(cell);
        }
    }
    let examined = map.len() as u64;
    set.workload = Workload {
        last: examined,
        total: examined,
    };
    set
}

/// Incremental update as a value-to-value function; see [`FrontierSet::update`].
pub fn update_frontiers(current: &FrontierSet, map: &GridMap, newly_updated: &[usize]) -> Result<FrontierSet> {
    let mut next = current.clone();
    next.update(map, newly_updated)?;
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierCluster {
    /// Member cells in ascending order.
    pub cells: Vec<usize>,
    /// Mean of the member cell centers.
    pub centroid: Point2<f64>,
}

/// Single-linkage clustering: two frontier cells belong to the same cluster
/// when a chain of members with consecutive center distances
/// `<= linkage_radius` connects them. Clusters are ordered by their smallest
/// cell index.
pub fn cluster_frontiers(frontiers: &FrontierSet, map: &GridMap, linkage_radius: f64) -> Vec<FrontierCluster> {
    assert!(linkage_radius > 0.0, "linkage radius must be positive");
    let cells = frontiers.sorted();
    if cells.is_empty() {
        return Vec::new();
    }
    let centers: Vec<Point2<f64>> = cells.iter().map(|&c| map.center(c)).collect();
    let bucket_of = |p: &Point2<f64>| ((p.x / linkage_radius).floor() as i64, (p.y / linkage_radius).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in centers.iter().enumerate() {
        buckets.entry(bucket_of(p)).or_default().push(i);
    }

    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    let r2 = linkage_radius * linkage_radius;
    for (i, p) in centers.iter().enumerate() {
        let (bx, by) = bucket_of(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(list) = buckets.get(&(bx + dx, by + dy)) else {
                    continue;
                };
                for &j in list {
                    if j > i && (centers[j] - p).norm_squared() <= r2 {
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        if a != b {
                            // smaller root wins, which keeps the result order-independent
                            let (lo, hi) = (a.min(b), a.max(b));
                            parent[hi] = lo;
                        }
                    }
                }
            }
        }
    }

    let mut by_root: Vec<Option<usize>> = vec![None; cells.len()];
    let mut clusters: Vec<(Vec<usize>, nalgebra::Vector2<f64>)> = Vec::new();
    for i in 0..cells.len() {
        let root = find(&mut parent, i);
        let k = *by_root[root].get_or_insert_with(|| {
            clusters.push((Vec::new(), nalgebra::Vector2::zeros()));
            clusters.len() - 1
        });
        clusters[k].0.push(cells[i]);
        clusters[k].1 += centers[i].coords;
    }
    clusters
        .into_iter()
        .map(|(cells, sum)| {
            let centroid = Point2::from(sum / cells.len() as f64);
            FrontierCluster { cells, centroid }
        })
        .collect()
}
