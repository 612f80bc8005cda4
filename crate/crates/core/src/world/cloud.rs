//! Wall-only point clouds extruded from the belief grid.

use nalgebra::{Point2, Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{Cell, GridMap};
use super::raster::line_of_sight;

/// Heights at which each exposed wall face is sampled.
pub const WALL_LEVELS: [f64; 4] = [0.2, 0.6, 1.0, 1.4];

/// Maximum tangential jitter applied to each synthesized point, in meters.
pub const FACE_JITTER: f64 = 0.05;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point3<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3<f64>>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Emits one point per exposed wall face and wall level for every known
/// `Occupied` cell whose center lies inside the horizontal `extent` around
/// `center`. A face is exposed when the neighbor across it is known `Free`.
/// Points sit on the face plane, jittered along the face by at most
/// [`FACE_JITTER`].
pub fn synthesize_point_cloud(map: &GridMap, center: Point2<f64>, extent: Vector3<f64>, seed: u64) -> PointCloud {
    let res = map.resolution();
    let jitter = FACE_JITTER.min(res / 2.0);
    let (half_x, half_y) = (extent.x / 2.0, extent.y / 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();

    let x_lo = (((center.x - half_x) / res).floor().max(0.0)) as usize;
    let y_lo = (((center.y - half_y) / res).floor().max(0.0)) as usize;
    let x_hi = (((center.x + half_x) / res).ceil().max(0.0) as usize).min(map.width());
    let y_hi = (((center.y + half_y) / res).ceil().max(0.0) as usize).min(map.height());

    for y in y_lo..y_hi {
        for x in x_lo..x_hi {
            let idx = map.index(x, y);
            if map.get(idx) != Cell::Occupied {
                continue;
            }
            let c = map.center(idx);
            if (c.x - center.x).abs() > half_x || (c.y - center.y).abs() > half_y {
                continue;
            }
            // (dx, dy) to the neighbor across the face.
            for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx < 0 || ny < 0 || nx >= map.width() as i64 || ny >= map.height() as i64 {
                    continue;
                }
                if map.at(nx as usize, ny as usize) != Cell::Free {
                    continue;
                }
                let face = Point2::new(c.x + dx as f64 * res / 2.0, c.y + dy as f64 * res / 2.0);
                for &z in WALL_LEVELS.iter().filter(|&&z| z <= extent.z) {
                    let u = rng.gen_range(-jitter..=jitter);
                    // tangent is perpendicular to the face normal (dx, dy)
                    let p = Point2::new(face.x - dy as f64 * u, face.y + dx as f64 * u);
                    points.push(Point3::new(p.x, p.y, z));
                }
            }
        }
    }
    PointCloud { points }
}

/// Keeps the points of `cloud` whose wall face can be seen from `eye`
/// through known free space.
pub fn visible_points(cloud: &PointCloud, map: &GridMap, eye: Point2<f64>) -> PointCloud {
    let nudge = map.resolution() * 0.01;
    let points = cloud
        .points
        .iter()
        .filter(|p| {
            let to = p.xy() - eye;
            let d = to.norm();
            d <= nudge || line_of_sight(map, eye, p.xy() - to * (nudge / d))
        })
        .copied()
        .collect();
    PointCloud { points }
}
