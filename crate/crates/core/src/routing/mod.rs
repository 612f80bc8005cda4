//! Grid paths and viewpoint tour ordering.

mod astar;
mod atsp;

pub use astar::{astar, DistanceField, PathResult};
pub use atsp::{
    brute_force_atsp, build_atsp_matrix, held_karp_atsp, heuristic_atsp, solve_atsp, tour_cost, CostMatrix, TourSolution, BRUTE_FORCE_LIMIT, EXACT_LIMIT,
};
