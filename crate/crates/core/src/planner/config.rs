use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::subregion::DetectionParams;
use crate::viewpoint::{CostWeights, ViewpointParams};
use crate::world::LidarConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    /// Full pipeline.
    Oto,
    /// Nearest frontier by path length.
    Greedy,
    /// Full pipeline without sub-region detection (`c_r` is always zero).
    OtoNoenclosed,
    /// Full pipeline without viewpoint refinement.
    OtoNorefine,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 4] = [PlannerKind::Oto, PlannerKind::Greedy, PlannerKind::OtoNoenclosed, PlannerKind::OtoNorefine];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Oto => "oto",
            PlannerKind::Greedy => "greedy",
            PlannerKind::OtoNoenclosed => "oto-noenclosed",
            PlannerKind::OtoNorefine => "oto-norefine",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown planner {s:?} (expected oto, greedy, oto-noenclosed or oto-norefine)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub planner: PlannerKind,
    pub seed: u64,
    /// Sensor range `R_max`, meters.
    pub sensor_range: f64,
    pub rays: usize,
    /// m/s.
    pub max_speed: f64,
    /// Simulation step, seconds.
    pub dt: f64,
    /// A leg is cut short after this much simulated time, seconds.
    pub replan_period: f64,
    /// Detection cube around the robot, meters. Its footprint is also the
    /// local planning horizon.
    pub cube_extent: Vector3<f64>,
    pub weights: CostWeights,
    pub detection: DetectionParams,
    /// Refinement radius `D_thr`, meters.
    pub refine_distance: f64,
    /// Viewpoint samples per cycle `K`.
    pub viewpoint_samples: usize,
    /// Free margin around sampled viewpoints, cells.
    pub clearance: usize,
    /// Frontier cluster linkage for global pseudo-viewpoints, meters.
    pub cluster_linkage: f64,
    /// Most viewpoints kept for the tour.
    pub tour_size: usize,
    /// A viewpoint joins the tour only if at least this fraction of the
    /// frontier cells it observes is not observed by a higher-utility
    /// viewpoint already kept.
    pub coverage_novelty: f64,
    /// Offer the previous tour's local viewpoints again in the next cycle.
    pub carry_viewpoints: bool,
    /// Cycles without newly observed cells before a cycle falls back to the
    /// nearest frontier.
    pub stall_cycles: usize,
    /// Simulation steps before the run is abandoned.
    pub max_steps: usize,
    /// Also time a full frontier rescan every cycle, for comparison.
    pub audit_full_scan: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            planner: PlannerKind::Oto,
            seed: 0,
            sensor_range: 15.0,
            rays: 720,
            max_speed: 2.0,
            dt: 0.1,
            replan_period: 2.0,
            cube_extent: Vector3::new(20.0, 20.0, 5.0),
            weights: CostWeights::default(),
            detection: DetectionParams::default(),
            refine_distance: 7.0,
            viewpoint_samples: 100,
            clearance: 1,
            cluster_linkage: 3.0,
            tour_size: 30,
            coverage_novelty: 0.5,
            carry_viewpoints: true,
            stall_cycles: 3,
            max_steps: 100_000,
            audit_full_scan: false,
        }
    }
}

impl PlannerConfig {
    pub fn with_planner(planner: PlannerKind, seed: u64) -> Self {
        Self {
            planner,
            seed,
            ..Self::default()
        }
    }

    pub fn lidar(&self) -> LidarConfig {
        LidarConfig {
            range: self.sensor_range,
            rays: self.rays,
        }
    }

    pub fn viewpoint_params(&self) -> ViewpointParams {
        ViewpointParams {
            samples: self.viewpoint_samples,
            clearance: self.clearance,
            range: self.sensor_range,
            cluster_linkage: self.cluster_linkage,
        }
    }

    /// Rejects values the loop cannot run with.
    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("sensor_range", self.sensor_range),
            ("max_speed", self.max_speed),
            ("dt", self.dt),
            ("replan_period", self.replan_period),
            ("refine_distance", self.refine_distance),
            ("cluster_linkage", self.cluster_linkage),
            ("detection.sample_radius", self.detection.sample_radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.cube_extent.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("cube_extent must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.coverage_novelty) {
            return Err(Error::InvalidArgument("coverage_novelty must lie in [0, 1]".into()));
        }
        let w = &self.weights;
        if [w.w_r, w.w_l, w.w_d].iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("cost weights must be non-negative".into()));
        }
        for (name, v) in [
            ("rays", self.rays),
            ("viewpoint_samples", self.viewpoint_samples),
            ("tour_size", self.tour_size),
            ("stall_cycles", self.stall_cycles),
            ("max_steps", self.max_steps),
            ("detection.neighbors", self.detection.neighbors),
        ] {
            if v == 0 {
                return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}
