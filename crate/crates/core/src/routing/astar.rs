//! Shortest 4-connected paths over known-free cells.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::GridMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    /// Meters.
    pub length: f64,
    /// Cell centers from the start cell to the goal cell.
    pub waypoints: Vec<Point2<f64>>,
    pub cells: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq)]
struct Open {
    f: f64,
    g: u32,
    cell: usize,
}

impl Eq for Open {}

impl Ord for Open {
    // min-heap on (f, cell)
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A* from the cell containing `from` to the cell containing `to`, moving
/// between 4-adjacent known-`Free` cells with a straight-line heuristic.
/// Equal-priority entries pop in cell-index order.
pub fn astar(map: &GridMap, from: Point2<f64>, to: Point2<f64>) -> Result<PathResult> {
    let start = map.try_cell_at(from)?;
    let goal = map.try_cell_at(to)?;
    if !map.is_free(start) || !map.is_free(goal) {
        return Err(Error::Unreachable);
    }
    let (gx, gy) = map.coords(goal);
    let h = |c: usize| {
        let (x, y) = map.coords(c);
        let (dx, dy) = (x as f64 - gx as f64, y as f64 - gy as f64);
        (dx * dx + dy * dy).sqrt()
    };

    let mut g_score = vec![u32::MAX; map.len()];
    let mut parent = vec![usize::MAX; map.len()];
    let mut closed = vec![false; map.len()];
    let mut open = BinaryHeap::new();
    g_score[start] = 0;
    open.push(Open {
        f: h(start),
        g: 0,
        cell: start,
    });
    while let Some(Open { g, cell, .. }) = open.pop() {
        if closed[cell] {
            continue;
        }
        closed[cell] = true;
        if cell == goal {
            break;
        }
        for n in map.neighbors4(cell) {
            if !map.is_free(n) || closed[n] {
                continue;
            }
            let ng = g + 1;
            if ng < g_score[n] {
                g_score[n] = ng;
                parent[n] = cell;
                open.push(Open {
                    f: ng as f64 + h(n),
                    g: ng,
                    cell: n,
                });
            }
        }
    }
    if !closed[goal] {
        return Err(Error::Unreachable);
    }

    let mut cells = vec![goal];
    while let Some(&last) = cells.last() {
        if last == start {
            break;
        }
        cells.push(parent[last]);
    }
    cells.reverse();
    Ok(PathResult {
        length: g_score[goal] as f64 * map.resolution(),
        waypoints: cells.iter().map(|&c| map.center(c)).collect(),
        cells,
    })
}

/// Breadth-first step counts from `source` over 4-connected known-free
/// cells; `u32::MAX` marks unreachable cells. Multiplying by the resolution
/// gives the same lengths as [`astar`].
#[derive(Clone, Debug)]
pub struct DistanceField {
    steps: Vec<u32>,
    resolution: f64,
}

impl DistanceField {
    pub fn from_cell(map: &GridMap, source: usize) -> Self {
        Self::bounded(map, source, &[])
    }

    /// Stops expanding once every cell in `targets` has been reached. An empty
    /// target list explores the whole reachable component.
    pub fn bounded(map: &GridMap, source: usize, targets: &[usize]) -> Self {
        let mut steps = vec![u32::MAX; map.len()];
        let mut remaining = targets.iter().filter(|&&t| t != source).count();
        let mut is_target = vec![false; if targets.is_empty() { 0 } else { map.len() }];
        for &t in targets {
            is_target[t] = true;
        }
        if map.is_free(source) {
            steps[source] = 0;
            let mut queue = VecDeque::from([source]);
            'bfs: while let Some(c) = queue.pop_front() {
                for n in map.neighbors4(c) {
                    if steps[n] == u32::MAX && map.is_free(n) {
                        steps[n] = steps[c] + 1;
                        queue.push_back(n);
                        if !is_target.is_empty() && is_target[n] {
                            remaining -= 1;
                            if remaining == 0 {
                                break 'bfs;
                            }
                        }
                    }
                }
            }
        }
        Self {
            steps,
            resolution: map.resolution(),
        }
    }

    /// Path length in meters, or `None` when unreachable.
    pub fn length(&self, cell: usize) -> Option<f64> {
        let s = self.steps[cell];
        (s != u32::MAX).then_some(s as f64 * self.resolution)
    }

    pub fn steps(&self, cell: usize) -> Option<u32> {
        let s = self.steps[cell];
        (s != u32::MAX).then_some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Cell;

    #[test]
    fn straight_corridor() {
        let map = GridMap::filled(11, 1, 1.0, Cell::Free);
        let p = astar(&map, Point2::new(0.5, 0.5), Point2::new(10.5, 0.5)).unwrap();
        assert_eq!(p.length, 10.0);
        assert_eq!(p.waypoints.len(), 11);
        assert_eq!(p.waypoints[0], Point2::new(0.5, 0.5));
    }

    #[test]
    fn full_wall_is_unreachable() {
        let mut cells = vec![Cell::Free; 25];
        for y in 0..5 {
            cells[y * 5 + 2] = Cell::Occupied;
        }
        let map = GridMap::from_cells(5, 5, 1.0, cells);
        assert_eq!(astar(&map, Point2::new(0.5, 0.5), Point2::new(4.5, 4.5)), Err(Error::Unreachable));
    }

    #[test]
    fn unknown_cells_block() {
        let mut map = GridMap::new(3, 1, 1.0);
        map.observe(0, Cell::Free);
        map.observe(2, Cell::Free);
        assert_eq!(astar(&map, Point2::new(0.5, 0.5), Point2::new(2.5, 0.5)), Err(Error::Unreachable));
    }

    #[test]
    fn same_cell_path() {
        let map = GridMap::filled(3, 3, 0.5, Cell::Free);
        let p = astar(&map, Point2::new(0.6, 0.6), Point2::new(0.7, 0.7)).unwrap();
        assert_eq!(p.length, 0.0);
        assert_eq!(p.cells.len(), 1);
    }

    #[test]
    fn distance_field_agrees_with_astar() {
        let scene = crate::world::generate::random_scene(24, 18, 0.5, 3);
        let map = scene.truth();
        let src = scene.start_cell();
        let field = DistanceField::from_cell(map, src);
        for c in (0..map.len()).filter(|&c| map.is_free(c)) {
            let a = astar(map, map.center(src), map.center(c)).ok().map(|p| p.length);
            assert_eq!(a, field.length(c));
        }
    }
}
