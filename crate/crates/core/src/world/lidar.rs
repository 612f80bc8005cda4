//! Planar 360° range sensor over the ground-truth grid.

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

use super::grid::{Cell, GridMap};
use super::raster::walk_ray;
use super::robot::RobotState;
use super::scene::Scene;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LidarConfig {
    /// Maximum range in meters.
    pub range: f64,
    /// Number of rays spread uniformly over 360°.
    pub rays: usize,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self { range: 15.0, rays: 720 }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScanResult {
    /// Cells that went from `Unknown` to `Free` or `Occupied`, in the order
    /// they were first observed.
    pub newly_updated: Vec<usize>,
    /// Wall hit points, just inside the struck cell.
    pub hits: Vec<Point2<f64>>,
}

/// Casts `config.rays` rays from the robot and integrates them into `map`.
///
/// Each ray marks the cells it crosses as `Free` until it meets a ground-truth
/// wall (marked `Occupied`) or leaves the range.
pub fn raycast_scan(scene: &Scene, map: &mut GridMap, robot: &RobotState, config: &LidarConfig) -> Result<ScanResult> {
    let origin = robot.position;
    let truth = scene.truth();
    truth.try_cell_at(origin)?;
    if map.width() != truth.width() || map.height() != truth.height() {
        return Err(Error::InvalidArgument("map and scene dimensions differ".into()));
    }

    let mut result = ScanResult::default();
    for k in 0..config.rays {
        let angle = std::f64::consts::TAU * k as f64 / config.rays as f64;
        let dir = Vector2::new(angle.cos(), angle.sin());
        walk_ray(truth, origin, dir, config.range, |cell, t_enter| {
            let state = truth.get(cell);
            if map.observe(cell, state) {
                result.newly_updated.push(cell);
            }
            if state == Cell::Occupied {
                result.hits.push(origin + dir * (t_enter + 1e-6));
                return false;
            }
            true
        });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::generate;

    fn robot_at(x: f64, y: f64) -> RobotState {
        RobotState::at(Point2::new(x, y), 2.0)
    }

    #[test]
    fn open_room_full_visibility() {
        let scene = generate::open_room(9, 9, 1.0);
        let mut map = GridMap::new(9, 9, 1.0);
        let cfg = LidarConfig::default();
        let scan = raycast_scan(&scene, &mut map, &robot_at(4.5, 4.5), &cfg).unwrap();
        assert_eq!(map.count(Cell::Unknown), 0);
        assert_eq!(map, *scene.truth());
        let mut updated = scan.newly_updated.clone();
        updated.sort_unstable();
        assert_eq!(updated, (0..81).collect::<Vec<_>>());

        let again = raycast_scan(&scene, &mut map, &robot_at(4.5, 4.5), &cfg).unwrap();
        assert!(again.newly_updated.is_empty());
    }

    #[test]
    fn hits_lie_on_walls() {
        let scene = generate::open_room(12, 7, 0.5);
        let mut map = GridMap::new(12, 7, 0.5);
        let scan = raycast_scan(&scene, &mut map, &robot_at(1.3, 1.1), &LidarConfig::default()).unwrap();
        assert_eq!(scan.hits.len(), 720);
        for h in &scan.hits {
            let c = map.cell_at(*h).unwrap();
            assert_eq!(map.get(c), Cell::Occupied);
        }
    }

    #[test]
    fn range_limits_updates() {
        let scene = generate::open_room(41, 5, 1.0);
        let mut map = GridMap::new(41, 5, 1.0);
        let cfg = LidarConfig { range: 5.0, rays: 720 };
        raycast_scan(&scene, &mut map, &robot_at(20.5, 2.5), &cfg).unwrap();
        assert_eq!(map.at(26, 2), Cell::Unknown);
        assert_eq!(map.at(25, 2), Cell::Free);
        assert_eq!(map.at(14, 2), Cell::Unknown);
    }

    #[test]
    fn pose_outside_grid_is_an_error() {
        let scene = generate::open_room(5, 5, 1.0);
        let mut map = GridMap::new(5, 5, 1.0);
        let err = raycast_scan(&scene, &mut map, &robot_at(-1.0, 2.0), &LidarConfig::default());
        assert!(matches!(err, Err(Error::OutsideGrid { .. })));
    }
}
