use std::time::Instant;

use nalgebra::Point2;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::PlannerConfig;
use super::cycle::{greedy_baseline_cycle, plan_cycle, Plan, PlanSource};
use super::metrics::{CoverageSample, ExplorationMetrics, StageTimings, Termination, TrajectorySample};
use crate::error::{Error, Result};
use crate::frontier::{full_scan_frontiers, FrontierSet};
use crate::subregion::RegionRegistry;
use crate::world::{raycast_scan, GridMap, RobotState, Scene};

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub metrics: ExplorationMetrics,
    pub timings: StageTimings,
    pub trajectory: Vec<TrajectorySample>,
    pub map: GridMap,
    pub registry: RegionRegistry,
}

/// State handed to the observer after each frontier update, before planning.
pub struct CycleReport<'a> {
    pub cycle: usize,
    pub time: f64,
    pub robot: &'a RobotState,
    pub map: &'a GridMap,
    pub frontiers: &'a FrontierSet,
    /// Cells first observed since the previous report.
    pub newly_updated: &'a [usize],
    pub registry: &'a RegionRegistry,
    /// Goal of the plan executed in the previous cycle.
    pub last_goal: Option<Point2<f64>>,
}

pub fn run_exploration(scene: &Scene, config: &PlannerConfig) -> Result<RunOutput> {
    run_exploration_observed(scene, config, &mut |_| {})
}

/// Moves along `waypoints[*next..]` for one time step, passing through as
/// many waypoints as the speed allows.
fn advance(state: &RobotState, waypoints: &[Point2<f64>], next: &mut usize, dt: f64) -> RobotState {
    let mut pos = state.position;
    let mut budget = state.max_speed * dt;
    while *next < waypoints.len() && budget > 0.0 {
        let to = waypoints[*next] - pos;
        let d = to.norm();
        if d <= budget {
            pos = waypoints[*next];
            budget -= d;
            *next += 1;
        } else {
            pos += to * (budget / d);
            budget = 0.0;
        }
    }
    RobotState {
        position: pos,
        velocity: (pos - state.position) / dt,
        max_speed: state.max_speed,
    }
}

/// Runs scan → frontier update → plan → move until no reachable frontier
/// remains or the step cap is hit. `observer` sees the state after every
/// frontier update.
///
/// A leg ends when the robot reaches the plan's goal or after
/// `replan_period` simulated seconds. When several cycles in a row observe
/// nothing new, cycles head for the nearest frontier until progress resumes.
pub fn run_exploration_observed(scene: &Scene, config: &PlannerConfig, observer: &mut dyn FnMut(&CycleReport)) -> Result<RunOutput> {
    config.validate()?;
    let lidar = config.lidar();
    let reachable = scene.reachable_free();
    let reachable_total = reachable.iter().filter(|&&r| r).count().max(1);
    let mut known_reachable = 0usize;

    let mut map = GridMap::new(scene.width(), scene.height(), scene.resolution());
    let mut frontiers = FrontierSet::new(map.len());
    let mut registry = RegionRegistry::new();
    let mut state = RobotState::at(scene.start_pose().position(), config.max_speed);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut pending = raycast_scan(scene, &mut map, &state, &lidar)?.newly_updated;
    let mut distance = 0.0;
    let mut steps = 0usize;
    let mut cycles = 0usize;
    let mut stalled = 0usize;
    let mut fallback_cycles = 0usize;
    let mut last_goal = None;
    let mut carried = Vec::new();
    let mut coverage = Vec::new();
    let mut workload = Vec::new();
    let mut timings = StageTimings::default();
    let mut trajectory = vec![TrajectorySample {
        t: 0.0,
        x: state.position.x,
        y: state.position.y,
    }];

    let termination = loop {
        let cycle_start = Instant::now();
        let t0 = Instant::now();
        let examined = frontiers.update(&map, &pending)?;
        let frontier_update = t0.elapsed().as_secs_f64();
        let full_scan = config.audit_full_scan.then(|| {
            let t0 = Instant::now();
            let full = full_scan_frontiers(&map);
            let dt = t0.elapsed().as_secs_f64();
            debug_assert!(full == frontiers);
            dt
        });
        workload.push(examined);
        known_reachable += pending.iter().filter(|&&c| reachable[c]).count();
        let time = distance / config.max_speed;
        coverage.push(CoverageSample {
            time,
            fraction: known_reachable as f64 / reachable_total as f64,
        });
        stalled = if pending.is_empty() { stalled + 1 } else { 0 };
        observer(&CycleReport {
            cycle: cycles,
            time,
            robot: &state,
            map: &map,
            frontiers: &frontiers,
            newly_updated: &pending,
            registry: &registry,
            last_goal,
        });
        pending.clear();

        if frontiers.is_empty() {
            break Termination::Complete;
        }
        if steps >= config.max_steps || cycles >= config.max_steps {
            break Termination::Cap;
        }

        let cycle_seed = rng.next_u64();
        let planned = if stalled >= config.stall_cycles {
            greedy_baseline_cycle(&map, &frontiers, &state)
        } else {
            plan_cycle(&state, &map, &frontiers, &mut registry, &carried, config, cycle_seed)
        };
        let plan: Plan = match planned {
            Ok(p) => p,
            Err(Error::Unreachable) => break Termination::UnreachableRemainder,
            Err(e) => return Err(e),
        };
        if plan.source == PlanSource::NearestFrontier && config.planner != super::PlannerKind::Greedy {
            fallback_cycles += 1;
        }
        last_goal = Some(plan.goal);
        carried = plan.tour_viewpoints();
        let mut timing = plan.timing;
        timing.frontier_update = frontier_update;
        timing.full_scan = full_scan;

        let mut next = 0;
        let leg_start = distance;
        while next < plan.waypoints.len() && steps < config.max_steps {
            let moved = advance(&state, &plan.waypoints, &mut next, config.dt);
            distance += (moved.position - state.position).norm();
            state = moved;
            steps += 1;
            pending.extend(raycast_scan(scene, &mut map, &state, &lidar)?.newly_updated);
            trajectory.push(TrajectorySample {
                t: distance / config.max_speed,
                x: state.position.x,
                y: state.position.y,
            });
            if (distance - leg_start) / config.max_speed >= config.replan_period - 1e-9 {
                break;
            }
        }
        cycles += 1;
        timing.total = cycle_start.elapsed().as_secs_f64();
        timings.cycles.push(timing);
    };

    let metrics = ExplorationMetrics {
        planner: config.planner,
        seed: config.seed,
        distance,
        sim_time: distance / config.max_speed,
        steps,
        cycles,
        termination,
        final_coverage: known_reachable as f64 / reachable_total as f64,
        coverage,
        frontier_workload_total: workload.iter().sum(),
        frontier_workload: workload,
        map_cells: map.len(),
        fallback_cycles,
        regions_detected: registry.len(),
        remaining_frontiers: frontiers.len(),
    };
    Ok(RunOutput {
        metrics,
        timings,
        trajectory,
        map,
        registry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::PlannerKind;
    use crate::world::generate::{maze, open_room};

    #[test]
    fn trivial_room_completes() {
        let scene = open_room(5, 5, 1.0);
        for kind in PlannerKind::ALL {
            let out = run_exploration(&scene, &PlannerConfig::with_planner(kind, 1)).unwrap();
            assert_eq!(out.metrics.termination, Termination::Complete);
            assert_eq!(out.metrics.final_coverage, 1.0);
            assert_eq!(out.metrics.distance, 0.0);
        }
    }

    #[test]
    fn advance_follows_polyline() {
        let s = RobotState::at(Point2::new(0.0, 0.0), 2.0);
        let wps = [Point2::new(0.1, 0.0), Point2::new(0.1, 1.0)];
        let mut next = 0;
        let n = advance(&s, &wps, &mut next, 0.1);
        assert_eq!(next, 1);
        assert!((n.position - Point2::new(0.1, 0.1)).norm() < 1e-12);
    }

    #[test]
    fn maze_runs_are_safe_and_monotone() {
        let scene = maze(4, 4, 3, 0.5, 3);
        for kind in PlannerKind::ALL {
            let out = run_exploration(&scene, &PlannerConfig::with_planner(kind, 2)).unwrap();
            let m = &out.metrics;
            assert_eq!(m.termination, Termination::Complete, "{kind}");
            assert!(m.final_coverage >= 0.99, "{kind}: {}", m.final_coverage);
            assert!(m.coverage.windows(2).all(|w| w[1].fraction >= w[0].fraction && w[1].time >= w[0].time));
            for p in &out.trajectory {
                let c = scene.truth().cell_at(Point2::new(p.x, p.y)).unwrap();
                assert!(scene.truth().is_free(c));
            }
            let walked: f64 = out
                .trajectory
                .windows(2)
                .map(|w| ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt())
                .sum();
            assert!((walked - m.distance).abs() < 1e-6);
            assert!((m.sim_time - m.distance / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn replay_is_identical() {
        let scene = maze(4, 4, 3, 0.5, 8);
        let cfg = PlannerConfig::with_planner(PlannerKind::Oto, 5);
        let mut goals_a = Vec::new();
        let a = run_exploration_observed(&scene, &cfg, &mut |r| goals_a.push(r.last_goal)).unwrap();
        let mut goals_b = Vec::new();
        let b = run_exploration_observed(&scene, &cfg, &mut |r| goals_b.push(r.last_goal)).unwrap();
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(goals_a, goals_b);
    }
}
