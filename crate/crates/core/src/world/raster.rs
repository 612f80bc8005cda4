//! Grid line traversal shared by the LiDAR model and line-of-sight checks.

use nalgebra::{Point2, Vector2};

use super::grid::{Cell, GridMap};

/// Crossing times closer than this are treated as passing exactly through a
/// cell corner, in which case the walk steps diagonally.
const CORNER_EPS: f64 = 1e-9;

/// Walks every cell whose interior the ray `origin + t * dir`, `0 <= t < max_dist`,
/// passes through, in order of entry. `dir` must be a unit vector.
///
/// `visit(cell, t_enter)` returns `false` to stop early. The walk also stops
/// when it leaves the grid. A ray starting outside the grid visits nothing.
pub fn walk_ray<F>(map: &GridMap, origin: Point2<f64>, dir: Vector2<f64>, max_dist: f64, mut visit: F)
where
    F: FnMut(usize, f64) -> bool,
{
    let res = map.resolution();
    let (w, h) = (map.width() as i64, map.height() as i64);
    let mut ix = (origin.x / res).floor() as i64;
    let mut iy = (origin.y / res).floor() as i64;
    if ix < 0 || iy < 0 || ix >= w || iy >= h {
        return;
    }

    let axis = |o: f64, d: f64, i: i64| -> (i64, f64, f64) {
        if d > 0.0 {
            (1, ((i + 1) as f64 * res - o) / d, res / d)
        } else if d < 0.0 {
            (-1, (i as f64 * res - o) / d, -res / d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_x, mut t_max_x, delta_x) = axis(origin.x, dir.x, ix);
    let (step_y, mut t_max_y, delta_y) = axis(origin.y, dir.y, iy);

    if !visit((iy * w + ix) as usize, 0.0) {
        return;
    }
    loop {
        let t_next = t_max_x.min(t_max_y);
        if t_next >= max_dist {
            return;
        }
        if (t_max_x - t_max_y).abs() <= CORNER_EPS {
            ix += step_x;
            iy += step_y;
            t_max_x += delta_x;
            t_max_y += delta_y;
        } else if t_max_x < t_max_y {
            ix += step_x;
            t_max_x += delta_x;
        } else {
            iy += step_y;
            t_max_y += delta_y;
        }
        if ix < 0 || iy < 0 || ix >= w || iy >= h {
            return;
        }
        if !visit((iy * w + ix) as usize, t_next) {
            return;
        }
    }
}

/// True when every cell the segment `a → b` passes through is known `Free`.
pub fn line_of_sight(map: &GridMap, a: Point2<f64>, b: Point2<f64>) -> bool {
    let delta = b - a;
    let dist = delta.norm();
    if dist < 1e-12 {
        return map.cell_at(a).is_some_and(|c| map.get(c) == Cell::Free);
    }
    if map.cell_at(a).is_none() || map.cell_at(b).is_none() {
        return false;
    }
    let mut clear = true;
    walk_ray(map, a, delta / dist, dist, |cell, _| {
        clear = map.get(cell) == Cell::Free;
        clear
    });
    clear
}
