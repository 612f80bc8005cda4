//! Enclosed sub-region detection.
//!
//! The wall cloud around the robot is thinned, a PCA normal is estimated at
//! every kept point and oriented toward the robot, and near-horizontal
//! normals vote for one of four direction classes. When at least three
//! classes collect more than `vote_threshold` normals, a wall line is fitted
//! per class and the union of the line extents is reported as the
//! sub-region's bounding box.

mod normals;
mod ransac;
mod registry;

use nalgebra::{Point2, Point3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use normals::{estimate_normal, sample_points, OrientedNormal, Quadrant};
pub use ransac::{fit_plane, trim_to_run, FittedPlane, RansacParams};
pub use registry::{registry_merge, registry_retire, Bounds, EnclosedRegion, RegionRegistry, MERGE_IOU};

use crate::spatial::KdTree;
use crate::world::PointCloud;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    /// Thinning radius `r`, meters.
    pub sample_radius: f64,
    /// Neighbors per normal estimate `n`.
    pub neighbors: usize,
    /// A quadrant is occupied when it holds strictly more than this many normals (`λ`).
    pub vote_threshold: usize,
    /// Steepest normal still counted as a wall (`α_max`), radians.
    pub max_inclination: f64,
    pub ransac: RansacParams,
    /// Inliers of a fitted wall further apart than this along the wall split
    /// it into separate pieces; only the piece facing the robot is kept, meters.
    pub max_wall_gap: f64,
}

impl Default for DetectionParams {
    fn default() -> Self {
        Self {
            sample_radius: 1.0,
            neighbors: 50,
            vote_threshold: 4,
            max_inclination: 15f64.to_radians(),
            ransac: RansacParams::default(),
            max_wall_gap: 2.5,
        }
    }
}

/// Everything the detector computed, for reporting and debugging.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// Indices of the thinned points in the input cloud.
    pub samples: Vec<usize>,
    /// One entry per sample whose normal could be estimated.
    pub normals: Vec<OrientedNormal>,
    /// Votes per quadrant, indexed by [`Quadrant::slot`].
    pub votes: [usize; 4],
    pub occupied: [bool; 4],
    pub planes: [Option<FittedPlane>; 4],
    pub region: Option<EnclosedRegion>,
}

impl Detection {
    pub fn occupied_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }
}

/// Runs the full detector on `cloud` around `local_origin`.
pub fn detect_enclosed(cloud: &PointCloud, local_origin: &Point3<f64>, params: &DetectionParams, seed: u64) -> Detection {
    let mut out = Detection {
        samples: sample_points(cloud, params.sample_radius),
        ..Detection::default()
    };
    if cloud.len() < params.neighbors {
        return out;
    }

    let tree = KdTree::build(&cloud.points);
    let mut assigned: [Vec<Point2<f64>>; 4] = Default::default();
    for &i in &out.samples {
        let p = cloud.points[i];
        let Ok(normal) = estimate_normal(&tree, &p, params.neighbors, local_origin, params.max_inclination) else {
            continue;
        };
        if let Some(q) = normal.quadrant {
            out.votes[q.slot()] += 1;
            assigned[q.slot()].push(p.xy());
        }
        out.normals.push(normal);
    }
    for q in Quadrant::ALL {
        out.occupied[q.slot()] = out.votes[q.slot()] > params.vote_threshold;
    }
    if out.occupied_count() < 3 {
        return out;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for q in Quadrant::ALL {
        if out.occupied[q.slot()] {
            let pts = &assigned[q.slot()];
            out.planes[q.slot()] = fit_plane(pts, &params.ransac, &mut rng).map(|plane| trim_to_run(&plane, pts, &local_origin.xy(), params.max_wall_gap));
        }
    }
    let limits = clip_to_cross_walls(&mut out.planes, &assigned, &params.ransac);
    let flat: Vec<Point2<f64>> = cloud.points.iter().map(|p| p.xy()).collect();
    for q in Quadrant::ALL {
        if let Some(plane) = out.planes[q.slot()].as_mut() {
            extend_to_cloud(
                plane,
                &assigned[q.slot()],
                &flat,
                params.sample_radius,
                params.ransac.inlier_threshold,
                limits[q.slot()],
            );
        }
    }
    let fitted: Vec<&FittedPlane> = out.planes.iter().flatten().collect();
    if fitted.len() < 3 {
        return out;
    }
    let bounds = Bounds::new(
        fitted.iter().map(|p| p.x_min).fold(f64::INFINITY, f64::min),
        fitted.iter().map(|p| p.x_max).fold(f64::NEG_INFINITY, f64::max),
        fitted.iter().map(|p| p.y_min).fold(f64::INFINITY, f64::min),
        fitted.iter().map(|p| p.y_max).fold(f64::NEG_INFINITY, f64::max),
    );
    if bounds.is_valid() {
        out.region = Some(EnclosedRegion::new(bounds));
    }
    out
}

/// Drops the inliers of each wall that lie beyond the walls fitted across it.
/// A wall facing the robot along x (slots `PosY`, `NegY`) is limited in x by
/// the walls on the robot's left (`PosX`) and right (`NegX`), and vice versa.
/// A wall left with fewer than `min_inliers` inliers is unfit. Returns the
/// along-wall limits applied to each slot.
fn clip_to_cross_walls(planes: &mut [Option<FittedPlane>; 4], points: &[Vec<Point2<f64>>; 4], ransac: &RansacParams) -> [(f64, f64); 4] {
    let mid = |q: Quadrant, x: bool| {
        planes[q.slot()]
            .as_ref()
            .map(|p| if x { (p.x_min + p.x_max) / 2.0 } else { (p.y_min + p.y_max) / 2.0 })
    };
    let x_range = (mid(Quadrant::PosX, true), mid(Quadrant::NegX, true));
    let y_range = (mid(Quadrant::PosY, false), mid(Quadrant::NegY, false));
    let tol = ransac.inlier_threshold;
    let mut limits = [(f64::NEG_INFINITY, f64::INFINITY); 4];
    for q in Quadrant::ALL {
        let Some(plane) = planes[q.slot()].as_ref() else {
            continue;
        };
        let along_x = matches!(q, Quadrant::PosY | Quadrant::NegY);
        let (lo, hi) = if along_x { x_range } else { y_range };
        let (lo, hi) = (lo.map_or(f64::NEG_INFINITY, |v| v - tol), hi.map_or(f64::INFINITY, |v| v + tol));
        limits[q.slot()] = (lo, hi);
        let pts = &points[q.slot()];
        let kept: Vec<usize> = plane
            .inliers
            .iter()
            .copied()
            .filter(|&i| {
                let v = if along_x { pts[i].x } else { pts[i].y };
                (lo..=hi).contains(&v)
            })
            .collect();
        planes[q.slot()] = (kept.len() >= ransac.min_inliers).then(|| FittedPlane::with_inliers(plane, pts, kept));
    }
    limits
}

/// Widens the extrema of `plane` to the cloud points its inlier samples
/// stand for. Thinning leaves every cloud point within `r` of a sample, so a
/// wall end can lie up to `r` beyond the outermost inlier sample. Cloud
/// points within `threshold` of the line whose position along the wall is
/// within `r` of the inlier samples' span, and inside the along-wall
/// `limits`, are taken into the extrema.
fn extend_to_cloud(plane: &mut FittedPlane, samples: &[Point2<f64>], cloud: &[Point2<f64>], r: f64, threshold: f64, limits: (f64, f64)) {
    let dir = nalgebra::Vector2::new(-plane.normal.y, plane.normal.x);
    let along = |p: &Point2<f64>| dir.dot(&p.coords);
    let (lo, hi) = plane
        .inliers
        .iter()
        .map(|&i| along(&samples[i]))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let along_x = plane.normal.y.abs() > plane.normal.x.abs();
    for p in cloud {
        let t = along(p);
        let v = if along_x { p.x } else { p.y };
        if plane.distance(p) <= threshold && t >= lo - r && t <= hi + r && v >= limits.0 && v <= limits.1 {
            plane.x_min = plane.x_min.min(p.x);
            plane.x_max = plane.x_max.max(p.x);
            plane.y_min = plane.y_min.min(p.y);
            plane.y_max = plane.y_max.max(p.y);
        }
    }
}
