use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;

use oto_core::planner::{run_exploration, ExplorationMetrics, PlannerConfig, PlannerKind, StageTimings, Termination};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::run::{read_scene, ConfigArgs};

#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub scenes: Vec<PathBuf>,
    pub planners: Vec<PlannerKind>,
    pub seeds: Vec<u64>,
    /// Output directory.
    pub out: PathBuf,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.scenes.is_empty() || self.planners.is_empty() || self.seeds.is_empty() {
            return Err(CliError::Usage("bench needs at least one scene, planner and seed".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.seeds.iter().find(|s| !seen.insert(**s)) {
            return Err(CliError::Usage(format!("seed {dup} listed twice")));
        }
        Ok(())
    }
}

/// One (scene, planner, seed) outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRow {
    pub scene: String,
    pub planner: PlannerKind,
    pub seed: u64,
    pub ok: bool,
    pub termination: Option<Termination>,
    pub distance: f64,
    pub sim_time: f64,
    pub cycles: usize,
    pub final_coverage: f64,
    pub frontier_workload_total: u64,
    pub map_cells: usize,
    pub error: String,
}

/// Aggregate over the seeds of one (scene, planner) pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scene: String,
    pub planner: PlannerKind,
    pub runs: usize,
    pub status: &'static str,
    pub distance_mean: f64,
    pub distance_max: f64,
    pub distance_min: f64,
    pub sim_time_mean: f64,
    pub sim_time_max: f64,
    pub sim_time_min: f64,
    /// Cells examined per cycle by the incremental frontier update.
    pub update_cells_per_cycle: f64,
    /// Cells a full rescan examines per cycle.
    pub full_scan_cells_per_cycle: f64,
}

/// Wall-clock columns, kept apart from the reproducible summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimingRow {
    pub scene: String,
    pub planner: PlannerKind,
    pub frontier_update_ms: f64,
    pub full_scan_ms: f64,
    pub cycle_ms: f64,
}

struct Outcome {
    row: RunRow,
    timings: Option<StageTimings>,
}

fn run_one(scene_name: &str, scene: &oto_core::world::Scene, base: &PlannerConfig, planner: PlannerKind, seed: u64) -> Outcome {
    let config = PlannerConfig {
        planner,
        seed,
        audit_full_scan: true,
        ..base.clone()
    };
    let mut row = RunRow {
        scene: scene_name.to_string(),
        planner,
        seed,
        ok: false,
        termination: None,
        distance: 0.0,
        sim_time: 0.0,
        cycles: 0,
        final_coverage: 0.0,
        frontier_workload_total: 0,
        map_cells: 0,
        error: String::new(),
    };
    match run_exploration(scene, &config) {
        Ok(out) => {
            let m: &ExplorationMetrics = &out.metrics;
            row.ok = m.termination != Termination::Cap;
            row.termination = Some(m.termination);
            row.distance = m.distance;
            row.sim_time = m.sim_time;
            row.cycles = m.cycles;
            row.final_coverage = m.final_coverage;
            row.frontier_workload_total = m.frontier_workload_total;
            row.map_cells = m.map_cells;
            if !row.ok {
                row.error = "step cap".into();
            }
            Outcome {
                row,
                timings: Some(out.timings),
            }
        }
        Err(e) => {
            row.error = e.to_string();
            Outcome { row, timings: None }
        }
    }
}

fn stats(v: &[f64]) -> (f64, f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    (mean, max, min)
}

pub fn summarize(rows: &[RunRow]) -> SummaryRow {
    let ok: Vec<&RunRow> = rows.iter().filter(|r| r.ok).collect();
    let d: Vec<f64> = ok.iter().map(|r| r.distance).collect();
    let t: Vec<f64> = ok.iter().map(|r| r.sim_time).collect();
    let (distance_mean, distance_max, distance_min) = stats(&d);
    let (sim_time_mean, sim_time_max, sim_time_min) = stats(&t);
    let cycles: usize = ok.iter().map(|r| r.cycles).sum();
    let per_cycle = |x: f64| if cycles == 0 { 0.0 } else { x / cycles as f64 };
    SummaryRow {
        scene: rows[0].scene.clone(),
        planner: rows[0].planner,
        runs: rows.len(),
        status: if ok.len() == rows.len() { "ok" } else { "failed" },
        distance_mean,
        distance_max,
        distance_min,
        sim_time_mean,
        sim_time_max,
        sim_time_min,
        update_cells_per_cycle: per_cycle(ok.iter().map(|r| r.frontier_workload_total as f64).sum()),
        full_scan_cells_per_cycle: per_cycle(ok.iter().map(|r| (r.map_cells * r.cycles) as f64).sum()),
    }
}

fn timing_row(scene: &str, planner: PlannerKind, timings: &[&StageTimings]) -> TimingRow {
    let cycles: Vec<_> = timings.iter().flat_map(|t| t.cycles.iter()).collect();
    let mean_ms = |f: &dyn Fn(&oto_core::planner::CycleTiming) -> Option<f64>| {
        let v: Vec<f64> = cycles.iter().filter_map(|c| f(c)).collect();
        if v.is_empty() {
            f64::NAN
        } else {
            1e3 * v.iter().sum::<f64>() / v.len() as f64
        }
    };
    TimingRow {
        scene: scene.to_string(),
        planner,
        frontier_update_ms: mean_ms(&|c| Some(c.frontier_update)),
        full_scan_ms: mean_ms(&|c| c.full_scan),
        cycle_ms: mean_ms(&|c| Some(c.total)),
    }
}

fn write_csv<T: Serialize>(path: PathBuf, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(&path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Runs every (scene, planner, seed) tuple on up to `jobs` threads and writes
/// `runs.csv`, `summary.csv` and `timing.csv` into `spec.out`. Row order
/// follows the spec order. Returns 2 when any run failed, else 0.
pub fn cmd_bench(spec: &BenchSpec, params: &ConfigArgs, jobs: usize) -> Result<i32, CliError> {
    spec.validate()?;
    let base = params.resolve()?;
    let scenes = spec
        .scenes
        .iter()
        .map(|p| Ok((p.display().to_string(), read_scene(p)?)))
        .collect::<Result<Vec<_>, CliError>>()?;

    let tuples: Vec<(usize, PlannerKind, u64)> = (0..scenes.len())
        .flat_map(|s| spec.planners.iter().flat_map(move |&p| spec.seeds.iter().map(move |&seed| (s, p, seed))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        tuples
            .par_iter()
            .map(|&(s, p, seed)| run_one(&scenes[s].0, &scenes[s].1, &base, p, seed))
            .collect()
    });

    let runs: Vec<RunRow> = outcomes.iter().map(|o| o.row.clone()).collect();
    let mut summary = Vec::new();
    let mut timing = Vec::new();
    for group in outcomes.chunks(spec.seeds.len()) {
        let rows: Vec<RunRow> = group.iter().map(|o| o.row.clone()).collect();
        let s = summarize(&rows);
        let t: Vec<&StageTimings> = group.iter().filter_map(|o| o.timings.as_ref()).collect();
        timing.push(timing_row(&s.scene, s.planner, &t));
        summary.push(s);
    }

    fs::create_dir_all(&spec.out).map_err(|e| CliError::io(&spec.out, e))?;
    write_csv(spec.out.join("runs.csv"), &runs)?;
    write_csv(spec.out.join("summary.csv"), &summary)?;
    write_csv(spec.out.join("timing.csv"), &timing)?;

    for s in &summary {
        println!(
            "{:<40} {:<15} {:>6} distance mean {:>8.2} min {:>8.2} max {:>8.2}",
            s.scene, s.planner, s.status, s.distance_mean, s.distance_min, s.distance_max
        );
    }
    Ok(if summary.iter().all(|s| s.status == "ok") { 0 } else { 2 })
}
