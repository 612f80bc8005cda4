use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Point3;
use oto_core::subregion::{detect_enclosed, Detection, DetectionParams, Quadrant};
use oto_core::world::PointCloud;

use crate::error::CliError;
use crate::overrides;
use crate::run::read;

#[derive(Clone, Debug, Default)]
pub struct DetectArgs {
    pub cloud: PathBuf,
    /// Local origin; the cloud centroid when absent.
    pub origin: Option<[f64; 3]>,
    pub seed: u64,
    /// `key=value` overrides of the detection parameters.
    pub set: Vec<String>,
}

/// Parses `x y z` lines. Blank lines and lines starting with `#` are skipped.
pub fn parse_cloud(path: &Path, text: &str) -> Result<PointCloud, CliError> {
    let mut points = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| CliError::Cloud {
            path: path.to_path_buf(),
            line: n + 1,
            message,
        };
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| bad(format!("not a number: {t:?}"))))
            .collect::<Result<_, _>>()?;
        if v.len() != 3 || v.iter().any(|x| !x.is_finite()) {
            return Err(bad(format!("expected three finite numbers, got {line:?}")));
        }
        points.push(Point3::new(v[0], v[1], v[2]));
    }
    Ok(PointCloud::new(points))
}

fn centroid(cloud: &PointCloud) -> Point3<f64> {
    if cloud.is_empty() {
        return Point3::origin();
    }
    let sum = cloud.points.iter().fold(nalgebra::Vector3::zeros(), |a, p| a + p.coords);
    Point3::from(sum / cloud.len() as f64)
}

/// Human-readable report: votes, occupied quadrants, fitted walls and the box.
pub fn report(d: &Detection) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "samples {} normals {}", d.samples.len(), d.normals.len());
    for q in Quadrant::ALL {
        let i = q.slot();
        let _ = write!(
            s,
            "quadrant {} votes {} {}",
            q as usize,
            d.votes[i],
            if d.occupied[i] { "occupied" } else { "empty" }
        );
        if let Some(p) = &d.planes[i] {
            let _ = write!(
                s,
                " plane n ({:.3}, {:.3}) offset {:.3} inliers {} x [{:.3}, {:.3}] y [{:.3}, {:.3}]",
                p.normal.x,
                p.normal.y,
                p.offset,
                p.inliers.len(),
                p.x_min,
                p.x_max,
                p.y_min,
                p.y_max
            );
        }
        s.push('\n');
    }
    match &d.region {
        Some(r) => {
            let b = &r.bounds;
            let _ = writeln!(s, "box x [{:.3}, {:.3}] y [{:.3}, {:.3}]", b.x_min, b.x_max, b.y_min, b.y_max);
        }
        None => s.push_str("no enclosure\n"),
    }
    s
}

pub fn cmd_detect(args: &DetectArgs) -> Result<(i32, String), CliError> {
    let cloud = parse_cloud(&args.cloud, &read(&args.cloud)?)?;
    let pairs = args.set.iter().map(|s| overrides::parse_kv_arg(s)).collect::<Result<Vec<_>, _>>()?;
    let params: DetectionParams = overrides::apply(&DetectionParams::default(), &pairs)?;
    let origin = args.origin.map_or_else(|| centroid(&cloud), |o| Point3::new(o[0], o[1], o[2]));
    let detection = detect_enclosed(&cloud, &origin, &params, args.seed);
    Ok((0, report(&detection)))
}
