//! Random-sample consensus for vertical wall planes, fitted as lines in the
//! horizontal projection.

use nalgebra::{Matrix2, Point2, SymmetricEigen, Vector2};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RansacParams {
    pub iterations: usize,
    /// Maximum point-to-line distance for an inlier, meters.
    pub inlier_threshold: f64,
    pub min_inliers: usize,
}

impl Default for RansacParams {
    fn default() -> Self {
        Self {
            iterations: 100,
            inlier_threshold: 0.2,
            min_inliers: 5,
        }
    }
}

/// A vertical plane `normal · p = offset` with the horizontal extent of its inliers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedPlane {
    pub normal: Vector2<f64>,
    pub offset: f64,
    /// Indices into the fitted point slice.
    pub inliers: Vec<usize>,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl FittedPlane {
    /// The same line restricted to `inliers`, with extrema recomputed.
    pub fn with_inliers(&self, points: &[Point2<f64>], inliers: Vec<usize>) -> FittedPlane {
        let (x_min, x_max, y_min, y_max) = extrema(points, &inliers);
        FittedPlane {
            inliers,
            x_min,
            x_max,
            y_min,
            y_max,
            ..self.clone()
        }
    }

    pub fn distance(&self, p: &Point2<f64>) -> f64 {
        (self.normal.dot(&p.coords) - self.offset).abs()
    }
}

fn inliers_of(points: &[Point2<f64>], normal: &Vector2<f64>, offset: f64, threshold: f64) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| (normal.dot(&p.coords) - offset).abs() <= threshold)
        .map(|(i, _)| i)
        .collect()
}

/// Fits one line by consensus over random point pairs, then refines it by
/// total least squares on the consensus set. Returns `None` when no
/// hypothesis gathers `min_inliers` inliers.
pub fn fit_plane<R: Rng>(points: &[Point2<f64>], params: &RansacParams, rng: &mut R) -> Option<FittedPlane> {
    if points.len() < 2 || points.len() < params.min_inliers {
        return None;
    }
    let mut best: Option<Vec<usize>> = None;
    for _ in 0..params.iterations {
        let i = rng.gen_range(0..points.len());
        let mut j = rng.gen_range(0..points.len() - 1);
        if j >= i {
            j += 1;
        }
        let d = points[j] - points[i];
        let len = d.norm();
        if len < 1e-9 {
            continue;
        }
        let normal = Vector2::new(-d.y, d.x) / len;
        let offset = normal.dot(&points[i].coords);
        let inl = inliers_of(points, &normal, offset, params.inlier_threshold);
        if best.as_ref().is_none_or(|b| inl.len() > b.len()) {
            best = Some(inl);
        }
    }
    let consensus = best.filter(|b| b.len() >= params.min_inliers)?;

    let mean = consensus.iter().fold(Vector2::zeros(), |a, &i| a + points[i].coords) / consensus.len() as f64;
    let cov = consensus.iter().fold(Matrix2::zeros(), |a, &i| {
        let d = points[i].coords - mean;
        a + d * d.transpose()
    });
    let eig = SymmetricEigen::new(cov);
    let k = if eig.eigenvalues[0] <= eig.eigenvalues[1] { 0 } else { 1 };
    let mut normal: Vector2<f64> = eig.eigenvectors.column(k).into_owned().normalize();
    if normal.x < 0.0 || (normal.x == 0.0 && normal.y < 0.0) {
        normal = -normal;
    }
    let offset = normal.dot(&mean);
    let mut inliers = inliers_of(points, &normal, offset, params.inlier_threshold);
    if inliers.len() < consensus.len() {
        inliers = consensus;
    }

    let (x_min, x_max, y_min, y_max) = extrema(points, &inliers);
    Some(FittedPlane {
        normal,
        offset,
        inliers,
        x_min,
        x_max,
        y_min,
        y_max,
    })
}

/// Restricts `plane` to the run of inliers containing, or nearest to, the
/// projection of `anchor` onto the line, where consecutive inliers along the
/// line are at most `max_gap` apart. Extrema are recomputed over the run.
pub fn trim_to_run(plane: &FittedPlane, points: &[Point2<f64>], anchor: &Point2<f64>, max_gap: f64) -> FittedPlane {
    let dir = Vector2::new(-plane.normal.y, plane.normal.x);
    let mut along: Vec<(f64, usize)> = plane.inliers.iter().map(|&i| (dir.dot(&points[i].coords), i)).collect();
    along.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let a = dir.dot(&anchor.coords);
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=along.len() {
        if k == along.len() || along[k].0 - along[k - 1].0 > max_gap {
            runs.push((start, k));
            start = k;
        }
    }
    let gap_to = |&(s, e): &(usize, usize)| (along[s].0 - a).max(a - along[e - 1].0).max(0.0);
    let &(s, e) = runs.iter().min_by(|x, y| gap_to(x).total_cmp(&gap_to(y))).expect("a fitted plane has inliers");
    let mut inliers: Vec<usize> = along[s..e].iter().map(|&(_, i)| i).collect();
    inliers.sort_unstable();
    plane.with_inliers(points, inliers)
}

fn extrema(points: &[Point2<f64>], inliers: &[usize]) -> (f64, f64, f64, f64) {
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &i in inliers {
        let p = points[i];
        x_min = x_min.min(p.x);
        x_max = x_max.max(p.x);
        y_min = y_min.min(p.y);
        y_max = y_max.max(p.y);
    }
    (x_min, x_max, y_min, y_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recovers_a_wall_despite_outliers() {
        let mut pts: Vec<Point2<f64>> = (0..12).map(|i| Point2::new(3.0 + 0.01 * (i % 3) as f64, i as f64 * 0.5)).collect();
        pts.push(Point2::new(0.0, 0.0));
        pts.push(Point2::new(-2.0, 4.0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let plane = fit_plane(&pts, &RansacParams::default(), &mut rng).unwrap();
        assert_eq!(plane.inliers.len(), 12);
        assert!((plane.normal.x - 1.0).abs() < 1e-3);
        assert!((plane.offset - 3.01).abs() < 0.02);
        assert_eq!((plane.y_min, plane.y_max), (0.0, 5.5));
        assert!(plane.x_min >= 3.0 && plane.x_max <= 3.02);
    }

    #[test]
    fn trim_keeps_run_nearest_anchor() {
        // two collinear wall pieces on y = 0 separated by a 4 m gap
        let pts: Vec<Point2<f64>> = (0..6)
            .map(|i| Point2::new(i as f64, 0.0))
            .chain((0..6).map(|i| Point2::new(9.0 + i as f64, 0.0)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let plane = fit_plane(&pts, &RansacParams::default(), &mut rng).unwrap();
        assert_eq!(plane.inliers.len(), 12);
        let near = trim_to_run(&plane, &pts, &Point2::new(2.0, 3.0), 2.5);
        assert_eq!(near.inliers, (0..6).collect::<Vec<_>>());
        assert_eq!((near.x_min, near.x_max), (0.0, 5.0));
        // anchor inside the gap but closer to the right piece
        let right = trim_to_run(&plane, &pts, &Point2::new(8.0, -3.0), 2.5);
        assert_eq!((right.x_min, right.x_max), (9.0, 14.0));
        // a generous gap keeps everything
        assert_eq!(trim_to_run(&plane, &pts, &Point2::new(2.0, 3.0), 5.0), plane);
    }

    #[test]
    fn too_few_points_fail() {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(fit_plane(&pts, &RansacParams::default(), &mut rng).is_none());
    }

    #[test]
    fn scattered_points_fail() {
        let pts: Vec<Point2<f64>> = (0..8).map(|i| Point2::new((i * 7 % 5) as f64 * 3.0, (i * 3 % 8) as f64 * 2.5)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = RansacParams {
            min_inliers: 5,
            inlier_threshold: 0.05,
            ..Default::default()
        };
        assert!(fit_plane(&pts, &params, &mut rng).is_none());
    }
}
