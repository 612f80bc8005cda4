use serde::{Deserialize, Serialize};

use super::config::PlannerKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// No frontier cells remain.
    Complete,
    /// Frontier cells remain but none is reachable through known free space.
    UnreachableRemainder,
    /// The step cap was hit.
    Cap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageSample {
    /// Simulated seconds.
    pub time: f64,
    /// Known cells among the ground-truth free cells reachable from the start.
    pub fraction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// Deterministic outcome of one run. Wall-clock measurements live in
/// [`StageTimings`] so that this record is reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplorationMetrics {
    pub planner: PlannerKind,
    pub seed: u64,
    /// Sum of step displacements, meters.
    pub distance: f64,
    /// `distance / max_speed`, seconds.
    pub sim_time: f64,
    pub steps: usize,
    pub cycles: usize,
    pub termination: Termination,
    pub final_coverage: f64,
    /// One sample per planning cycle plus the final state.
    pub coverage: Vec<CoverageSample>,
    /// Cells examined by the incremental frontier update, per cycle.
    pub frontier_workload: Vec<u64>,
    pub frontier_workload_total: u64,
    /// Cells a full rescan examines per cycle.
    pub map_cells: usize,
    /// Cycles that fell back to the nearest frontier.
    pub fallback_cycles: usize,
    pub regions_detected: usize,
    pub remaining_frontiers: usize,
}

/// Wall-clock seconds spent in each stage of one cycle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CycleTiming {
    pub frontier_update: f64,
    /// Only measured when the full-scan audit is enabled.
    pub full_scan: Option<f64>,
    pub detection: f64,
    pub viewpoints: f64,
    pub routing: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub cycles: Vec<CycleTiming>,
}

impl StageTimings {
    fn column(&self, f: impl Fn(&CycleTiming) -> Option<f64>) -> Vec<f64> {
        self.cycles.iter().filter_map(f).collect()
    }

    pub fn mean_frontier_update(&self) -> f64 {
        mean(&self.column(|c| Some(c.frontier_update)))
    }

    pub fn mean_full_scan(&self) -> Option<f64> {
        let v = self.column(|c| c.full_scan);
        (!v.is_empty()).then(|| mean(&v))
    }

    pub fn total(&self) -> f64 {
        self.cycles.iter().map(|c| c.total).sum()
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}
