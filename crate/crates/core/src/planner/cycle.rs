use std::time::Instant;

use nalgebra::{Point2, Point3};
use serde::{Deserialize, Serialize};

use super::config::{PlannerConfig, PlannerKind};
use super::metrics::CycleTiming;
use crate::error::{Error, Result};
use crate::frontier::FrontierSet;
use crate::routing::{astar, build_atsp_matrix, solve_atsp, DistanceField};
use crate::subregion::{detect_enclosed, Bounds, EnclosedRegion, RegionRegistry};
use crate::viewpoint::{
    direction_cost, generate_viewpoints, information_gain, observed_frontiers, refine_viewpoints, subregion_cost, total_cost_and_utility, Viewpoint,
    ViewpointKind,
};
use crate::world::{synthesize_point_cloud, visible_points, GridMap, RobotState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanSource {
    /// First viewpoint of the tour.
    Viewpoint,
    /// Nearest reachable frontier cell.
    NearestFrontier,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub goal: Point2<f64>,
    /// Cell centers from the robot's cell to the goal cell.
    pub waypoints: Vec<Point2<f64>>,
    pub path_length: f64,
    pub source: PlanSource,
    /// Scored viewpoints that entered the tour, in matrix order.
    pub viewpoints: Vec<Viewpoint>,
    /// Tour over `viewpoints` (node `i + 1` is `viewpoints[i]`), when one was solved.
    pub tour: Vec<usize>,
    /// Region detected this cycle, before merging into the registry.
    pub detected: Option<EnclosedRegion>,
    pub timing: CycleTiming,
}

impl Plan {
    /// Viewpoints in visiting order.
    pub fn tour_viewpoints(&self) -> Vec<Viewpoint> {
        self.tour.iter().skip(1).map(|&i| self.viewpoints[i - 1]).collect()
    }
}

fn secs(since: Instant) -> f64 {
    since.elapsed().as_secs_f64()
}

/// Nearest frontier cell by 4-connected path length through known free
/// space; equal lengths go to the lower cell index.
pub fn greedy_baseline_cycle(map: &GridMap, frontiers: &FrontierSet, state: &RobotState) -> Result<Plan> {
    let start = Instant::now();
    let robot_cell = map.try_cell_at(state.position)?;
    let field = DistanceField::bounded(map, robot_cell, &frontiers.sorted());
    let goal = nearest_frontier(&field, frontiers).ok_or(Error::Unreachable)?;
    let path = astar(map, state.position, map.center(goal))?;
    Ok(Plan {
        goal: map.center(goal),
        waypoints: path.waypoints,
        path_length: path.length,
        source: PlanSource::NearestFrontier,
        viewpoints: Vec::new(),
        tour: Vec::new(),
        detected: None,
        timing: CycleTiming {
            routing: secs(start),
            ..CycleTiming::default()
        },
    })
}

fn nearest_frontier(field: &DistanceField, frontiers: &FrontierSet) -> Option<usize> {
    frontiers.iter().filter_map(|c| field.steps(c).map(|s| (s, c))).min().map(|(_, c)| c)
}

/// Sub-region, path and heading costs for each viewpoint; viewpoints the
/// robot cannot reach, or is already standing on, are dropped.
fn score(vps: &[Viewpoint], field: &DistanceField, map: &GridMap, state: &RobotState, regions: &[EnclosedRegion], config: &PlannerConfig) -> Vec<Viewpoint> {
    vps.iter()
        .filter_map(|v| {
            let cell = map.cell_at(v.position)?;
            let steps = field.steps(cell)?;
            if steps == 0 {
                return None;
            }
            let scored = Viewpoint {
                region_cost: subregion_cost(v.position, regions),
                path_cost: steps as f64 * map.resolution(),
                direction_cost: direction_cost(state, v.position),
                ..*v
            };
            Some(total_cost_and_utility(&scored, &config.weights))
        })
        .collect()
}

/// Keeps viewpoints in decreasing utility order as long as each one adds
/// enough frontier cells not already covered by those kept before it, up to
/// `tour_size`. Global pseudo-viewpoints stand for whole clusters and are
/// kept whenever there is room.
fn select_covering(mut vps: Vec<Viewpoint>, map: &GridMap, frontiers: &FrontierSet, config: &PlannerConfig) -> Vec<Viewpoint> {
    // stable sort: equal utilities keep creation order
    vps.sort_by(|a, b| b.utility.total_cmp(&a.utility));
    let mut covered = vec![false; map.len()];
    let mut kept = Vec::new();
    for v in vps {
        if kept.len() == config.tour_size {
            break;
        }
        if v.kind == ViewpointKind::GlobalPseudo {
            kept.push(v);
            continue;
        }
        let seen: Vec<usize> = observed_frontiers(map, frontiers, v.position, config.sensor_range).collect();
        let fresh = seen.iter().filter(|&&c| !covered[c]).count();
        if fresh > 0 && fresh as f64 >= config.coverage_novelty * seen.len() as f64 {
            for c in seen {
                covered[c] = true;
            }
            kept.push(v);
        }
    }
    kept
}

/// Local viewpoints of the previous tour that still observe a frontier, with
/// their gain recomputed, skipping cells already sampled this cycle.
fn carry_over(carried: &[Viewpoint], sampled: &[Viewpoint], map: &GridMap, frontiers: &FrontierSet, range: f64) -> Vec<Viewpoint> {
    let taken: std::collections::HashSet<usize> = sampled.iter().filter_map(|v| map.cell_at(v.position)).collect();
    carried
        .iter()
        .filter(|v| v.kind == ViewpointKind::Local)
        .filter(|v| map.cell_at(v.position).is_some_and(|c| !taken.contains(&c)))
        .filter_map(|v| {
            let gain = information_gain(map, frontiers, v.position, range);
            (gain > 0).then(|| Viewpoint::new(v.position, gain as f64, ViewpointKind::Local))
        })
        .collect()
}

/// One pass of the pipeline: sub-region detection and registry upkeep,
/// viewpoint sampling, scoring, refinement, tour ordering, and an A* path to
/// the first viewpoint of the tour.
///
/// `carried` holds the previous plan's tour; when `carry_viewpoints` is set,
/// its local viewpoints rejoin this cycle's candidates so that a good tour
/// is not lost to resampling.
///
/// When no viewpoint survives, the plan heads for the nearest reachable
/// frontier instead. `Error::Unreachable` means no frontier can be reached.
pub fn plan_cycle(
    state: &RobotState,
    map: &GridMap,
    frontiers: &FrontierSet,
    registry: &mut RegionRegistry,
    carried: &[Viewpoint],
    config: &PlannerConfig,
    cycle_seed: u64,
) -> Result<Plan> {
    if config.planner == PlannerKind::Greedy {
        return greedy_baseline_cycle(map, frontiers, state);
    }
    let mut timing = CycleTiming::default();
    let pos = state.position;
    let robot_cell = map.try_cell_at(pos)?;

    let start = Instant::now();
    let mut detected = None;
    if config.planner != PlannerKind::OtoNoenclosed {
        let cloud = visible_points(&synthesize_point_cloud(map, pos, config.cube_extent, cycle_seed), map, pos);
        let origin = Point3::new(pos.x, pos.y, 0.0);
        let detection = detect_enclosed(&cloud, &origin, &config.detection, cycle_seed.wrapping_add(1));
        if let Some(region) = detection.region {
            registry.merge(region);
            detected = Some(region);
        }
        registry.retire(frontiers, map);
    }
    timing.detection = secs(start);

    let start = Instant::now();
    let field = DistanceField::from_cell(map, robot_cell);
    let half = config.cube_extent / 2.0;
    let horizon = Bounds::new(pos.x - half.x, pos.x + half.x, pos.y - half.y, pos.y + half.y);
    let regions: Vec<EnclosedRegion> = registry.alive().copied().collect();
    let mut sampled = generate_viewpoints(map, frontiers, &horizon, &config.viewpoint_params(), cycle_seed.wrapping_add(2));
    if config.carry_viewpoints {
        let kept = carry_over(carried, &sampled, map, frontiers, config.sensor_range);
        sampled.extend(kept);
    }
    let mut vps = score(&sampled, &field, map, state, &regions, config);
    if config.planner != PlannerKind::OtoNorefine {
        let refined = refine_viewpoints(&vps, config.refine_distance, map);
        vps = score(&refined, &field, map, state, &regions, config);
    }
    let vps = select_covering(vps, map, frontiers, config);
    timing.viewpoints = secs(start);

    let start = Instant::now();
    if vps.is_empty() {
        let mut plan = greedy_baseline_cycle(map, frontiers, state)?;
        plan.detected = detected;
        timing.routing = secs(start);
        plan.timing = timing;
        return Ok(plan);
    }
    let matrix = build_atsp_matrix(&vps, map, &config.weights)?;
    let tour = solve_atsp(&matrix)?;
    let first = &vps[tour.order[1] - 1];
    let path = astar(map, pos, first.position)?;
    timing.routing = secs(start);
    Ok(Plan {
        goal: first.position,
        waypoints: path.waypoints,
        path_length: path.length,
        source: PlanSource::Viewpoint,
        viewpoints: vps,
        tour: tour.order,
        detected,
        timing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontier::full_scan_frontiers;
    use crate::world::Cell;

    /// Known free strip `y = 1` from x = 1 to x = 14 of a 16×3 map, unknown
    /// beyond the given ends.
    fn strip(unknown_left: bool, unknown_right: bool) -> GridMap {
        let mut map = GridMap::new(16, 3, 1.0);
        for x in 0..16 {
            for y in 0..3 {
                let edge = y != 1 || (x == 0 && !unknown_left) || (x == 15 && !unknown_right);
                if (x == 0 && unknown_left) || (x == 15 && unknown_right) {
                    continue;
                }
                map.observe(map.index(x, y), if edge { Cell::Occupied } else { Cell::Free });
            }
        }
        map
    }

    #[test]
    fn greedy_picks_shorter_path() {
        let map = strip(true, true);
        let f = full_scan_frontiers(&map);
        assert_eq!(f.len(), 2);
        // robot at x = 5.5: left frontier (1,1) is 4 steps, right (14,1) is 9
        let state = RobotState::at(Point2::new(5.5, 1.5), 2.0);
        let plan = greedy_baseline_cycle(&map, &f, &state).unwrap();
        assert_eq!(plan.goal, Point2::new(1.5, 1.5));
        assert_eq!(plan.path_length, 4.0);
    }

    #[test]
    fn greedy_tie_goes_to_lower_index() {
        let mut wide = GridMap::new(7, 4, 1.0);
        for y in 1..3 {
            for x in 1..6 {
                wide.observe(wide.index(x, y), Cell::Free);
            }
        }
        for y in [0, 3] {
            for x in 0..7 {
                wide.observe(wide.index(x, y), Cell::Occupied);
            }
        }
        // frontiers at x = 1 and x = 5 on both rows; robot in the middle column
        let f = full_scan_frontiers(&wide);
        let plan = greedy_baseline_cycle(&wide, &f, &RobotState::at(Point2::new(3.5, 1.5), 2.0)).unwrap();
        assert_eq!(plan.goal, wide.center(wide.index(1, 1)));
    }

    #[test]
    fn no_reachable_frontier() {
        let map = strip(false, false);
        let f = full_scan_frontiers(&map);
        assert!(f.is_empty());
        let mut sealed = map.clone();
        // an isolated known-free cell next to unknown space, walled off
        sealed = {
            let mut cells = sealed.cells().to_vec();
            cells[sealed.index(15, 1)] = Cell::Unknown;
            cells[sealed.index(13, 1)] = Cell::Occupied;
            GridMap::from_cells(16, 3, 1.0, cells)
        };
        let f = full_scan_frontiers(&sealed);
        assert_eq!(f.len(), 1);
        let state = RobotState::at(Point2::new(3.5, 1.5), 2.0);
        assert_eq!(greedy_baseline_cycle(&sealed, &f, &state), Err(Error::Unreachable));
        let mut reg = RegionRegistry::new();
        assert_eq!(
            plan_cycle(&state, &sealed, &f, &mut reg, &[], &PlannerConfig::default(), 0),
            Err(Error::Unreachable)
        );
    }

    #[test]
    fn single_frontier_plan_reaches_toward_it() {
        let map = strip(false, true);
        let f = full_scan_frontiers(&map);
        assert_eq!(f.sorted(), vec![map.index(14, 1)]);
        let state = RobotState::at(Point2::new(2.5, 1.5), 2.0);
        let mut reg = RegionRegistry::new();
        // the strip is too narrow for the clearance, so the fallback kicks in
        let plan = plan_cycle(&state, &map, &f, &mut reg, &[], &PlannerConfig::default(), 0).unwrap();
        assert_eq!(plan.goal, Point2::new(14.5, 1.5));
        let cfg = PlannerConfig {
            clearance: 0,
            ..PlannerConfig::default()
        };
        let plan = plan_cycle(&state, &map, &f, &mut reg, &[], &cfg, 0).unwrap();
        assert_eq!(plan.source, PlanSource::Viewpoint);
        assert!(plan.path_length > 0.0);
        assert!(plan.waypoints.iter().all(|p| map.is_free(map.cell_at(*p).unwrap())));
    }
}
