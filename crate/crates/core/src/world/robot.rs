use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub position: Point2<f64>,
    pub velocity: Vector2<f64>,
    pub max_speed: f64,
}

impl RobotState {
    pub fn at(position: Point2<f64>, max_speed: f64) -> Self {
        Self {
            position,
            velocity: Vector2::zeros(),
            max_speed,
        }
    }
}

/// Moves toward `waypoint` at full speed for `dt` seconds, stopping on it.
/// A non-positive `dt` leaves the robot in place at rest.
pub fn step_robot(state: &RobotState, waypoint: Point2<f64>, dt: f64) -> RobotState {
    let delta = waypoint - state.position;
    let dist = delta.norm();
    if dt <= 0.0 || dist == 0.0 {
        return RobotState {
            velocity: Vector2::zeros(),
            ..*state
        };
    }
    let travel = (state.max_speed * dt).min(dist);
    let dir = delta / dist;
    RobotState {
        position: if travel == dist { waypoint } else { state.position + dir * travel },
        velocity: dir * (travel / dt),
        max_speed: state.max_speed,
    }
}
