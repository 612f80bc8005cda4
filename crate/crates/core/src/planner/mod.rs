//! The exploration loop: scan, update frontiers, plan, move.

mod config;
mod cycle;
mod metrics;
mod run;

pub use config::{PlannerConfig, PlannerKind};
pub use cycle::{greedy_baseline_cycle, plan_cycle, Plan, PlanSource};
pub use metrics::{CoverageSample, CycleTiming, ExplorationMetrics, StageTimings, Termination, TrajectorySample};
pub use run::{run_exploration, run_exploration_observed, CycleReport, RunOutput};
