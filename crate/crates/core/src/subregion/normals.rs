//! Point thinning and PCA surface normals.

use std::collections::HashMap;

use nalgebra::{Matrix3, Point3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::KdTree;
use crate::world::PointCloud;

/// Horizontal direction class of an inward-facing wall normal.
///
/// The four classes are sectors centered on the local axes: `PosX` collects
/// normals whose dominant horizontal component is `+x`, and so on
/// counter-clockwise. A normal exactly on a sector boundary (|x| = |y|) goes
/// to the lower-numbered neighbor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quadrant {
    PosX = 1,
    PosY = 2,
    NegX = 3,
    NegY = 4,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::PosX, Quadrant::PosY, Quadrant::NegX, Quadrant::NegY];

    /// Zero-based slot, `0..4`.
    pub fn slot(self) -> usize {
        self as usize - 1
    }

    /// One-based label, `1..=4`.
    pub fn number(self) -> usize {
        self as usize
    }

    pub fn of(x: f64, y: f64) -> Quadrant {
        let (ax, ay) = (x.abs(), y.abs());
        if ax > ay {
            if x > 0.0 {
                Quadrant::PosX
            } else {
                Quadrant::NegX
            }
        } else if ay > ax {
            if y > 0.0 {
                Quadrant::PosY
            } else {
                Quadrant::NegY
            }
        } else {
            match (x >= 0.0, y >= 0.0) {
                (true, true) | (true, false) => Quadrant::PosX,
                (false, true) => Quadrant::PosY,
                (false, false) => Quadrant::NegX,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedNormal {
    pub origin: Point3<f64>,
    /// Unit normal, flipped to face the local origin.
    pub direction: Vector3<f64>,
    /// Angle between the normal and the horizontal plane, radians.
    pub inclination: f64,
    /// `None` when the normal is too steep to count as a wall.
    pub quadrant: Option<Quadrant>,
}

/// Greedy thinning in index order: a point is kept when no previously kept
/// point lies closer than `r`. Returns the kept indices in ascending order.
pub fn sample_points(cloud: &PointCloud, r: f64) -> Vec<usize> {
    assert!(r > 0.0, "sampling radius must be positive");
    let key = |p: &Point3<f64>| ((p.x / r).floor() as i64, (p.y / r).floor() as i64, (p.z / r).floor() as i64);
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut kept = Vec::new();
    let r2 = r * r;
    for (i, p) in cloud.points.iter().enumerate() {
        let (kx, ky, kz) = key(p);
        let mut blocked = false;
        'scan: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = grid.get(&(kx + dx, ky + dy, kz + dz)) {
                        if list.iter().any(|&j| (cloud.points[j] - p).norm_squared() < r2) {
                            blocked = true;
                            break 'scan;
                        }
                    }
                }
            }
        }
        if !blocked {
            grid.entry((kx, ky, kz)).or_default().push(i);
            kept.push(i);
        }
    }
    kept
}

/// Normal of the `n` nearest neighbors of `p` (smallest principal axis),
/// oriented toward `local_origin`.
pub fn estimate_normal(tree: &KdTree<'_>, p: &Point3<f64>, n: usize, local_origin: &Point3<f64>, max_inclination: f64) -> Result<OrientedNormal> {
    if tree.len() < n || n == 0 {
        return Err(Error::TooFewPoints {
            have: tree.len(),
            need: n.max(1),
        });
    }
    let pts = tree.points();
    let nbrs = tree.nearest(p, n);
    let first = pts[nbrs[0]];
    if nbrs.iter().all(|&i| (pts[i] - first).norm() <= 1e-9) {
        return Err(Error::DegenerateNormal);
    }

    let mean = nbrs.iter().fold(Vector3::zeros(), |acc, &i| acc + pts[i].coords) / nbrs.len() as f64;
    let cov = nbrs.iter().fold(Matrix3::zeros(), |acc, &i| {
        let d = pts[i].coords - mean;
        acc + d * d.transpose()
    }) / nbrs.len() as f64;
    let eig = SymmetricEigen::new(cov);
    let smallest = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("3x3 matrix has eigenvalues");
    let mut dir: Vector3<f64> = eig.eigenvectors.column(smallest).into_owned().normalize();
    if dir.dot(&(local_origin - p)) < 0.0 {
        dir = -dir;
    }
    let inclination = dir.z.abs().min(1.0).asin();
    let quadrant = (inclination <= max_inclination).then(|| Quadrant::of(dir.x, dir.y));
    Ok(OrientedNormal {
        origin: *p,
        direction: dir,
        inclination,
        quadrant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn cloud(points: Vec<Point3<f64>>) -> PointCloud {
        PointCloud::new(points)
    }

    #[test]
    fn quadrant_sectors_and_ties() {
        assert_eq!(Quadrant::of(1.0, 0.0), Quadrant::PosX);
        assert_eq!(Quadrant::of(0.0, 1.0), Quadrant::PosY);
        assert_eq!(Quadrant::of(-1.0, 0.0), Quadrant::NegX);
        assert_eq!(Quadrant::of(0.0, -1.0), Quadrant::NegY);
        assert_eq!(Quadrant::of(1.0, 1.0), Quadrant::PosX);
        assert_eq!(Quadrant::of(-1.0, 1.0), Quadrant::PosY);
        assert_eq!(Quadrant::of(-1.0, -1.0), Quadrant::NegX);
        assert_eq!(Quadrant::of(1.0, -1.0), Quadrant::PosX);
        // small jitter around an axis does not change the class
        assert_eq!(Quadrant::of(-1.0, 1e-3), Quadrant::of(-1.0, -1e-3));
    }

    #[test]
    fn sampling_edge_cases() {
        assert!(sample_points(&PointCloud::default(), 1.0).is_empty());
        let c = cloud(vec![Point3::new(0.0, 0.0, 0.0), Point3::new(0.5, 0.0, 0.0)]);
        assert_eq!(sample_points(&c, 1.0), vec![0]);
    }

    #[test]
    fn sampled_wall_points_are_spread_out() {
        let pts: Vec<Point3<f64>> = (0..=200).map(|i| Point3::new(i as f64 * 0.05, 2.0, 0.5)).collect();
        let c = cloud(pts);
        let kept = sample_points(&c, 1.0);
        assert!(kept.len() <= 11);
        for (a, &i) in kept.iter().enumerate() {
            for &j in &kept[a + 1..] {
                assert!((c.points[i] - c.points[j]).norm() >= 1.0);
            }
        }
    }

    fn plane_x5() -> Vec<Point3<f64>> {
        let mut pts = Vec::new();
        for i in 0..10 {
            for k in 0..6 {
                pts.push(Point3::new(5.0, -2.0 + i as f64 * 0.4, 0.2 + k as f64 * 0.25));
            }
        }
        pts
    }

    #[test]
    fn vertical_plane_normal_faces_origin() {
        let pts = plane_x5();
        let tree = KdTree::build(&pts);
        let n = estimate_normal(&tree, &pts[25], 50, &Point3::origin(), 15f64.to_radians()).unwrap();
        assert!((n.direction - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-9);
        assert!(n.inclination.abs() < 1e-9);
        assert_eq!(n.quadrant, Some(Quadrant::NegX));
        assert!((n.direction.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn horizontal_plane_has_no_quadrant() {
        let pts: Vec<Point3<f64>> = (0..60).map(|i| Point3::new((i % 8) as f64 * 0.3, (i / 8) as f64 * 0.3, 1.0)).collect();
        let tree = KdTree::build(&pts);
        let n = estimate_normal(&tree, &pts[10], 50, &Point3::origin(), 15f64.to_radians()).unwrap();
        assert!((n.inclination - FRAC_PI_2).abs() < 1e-9);
        assert_eq!(n.quadrant, None);
        assert_eq!(n.direction.z, -1.0);
    }

    #[test]
    fn degenerate_and_short_neighborhoods() {
        let pts = vec![Point3::new(1.0, 1.0, 1.0); 60];
        let tree = KdTree::build(&pts);
        assert_eq!(estimate_normal(&tree, &pts[0], 50, &Point3::origin(), 0.3), Err(Error::DegenerateNormal));
        let few = plane_x5()[..10].to_vec();
        let tree = KdTree::build(&few);
        assert!(matches!(
            estimate_normal(&tree, &few[0], 50, &Point3::origin(), 0.3),
            Err(Error::TooFewPoints { have: 10, need: 50 })
        ));
    }
}
