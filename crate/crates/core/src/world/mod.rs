//! Ground-truth scenes, the belief grid, the LiDAR model and robot motion.

mod cloud;
pub mod generate;
mod grid;
mod lidar;
mod raster;
mod robot;
mod scene;

pub use cloud::{synthesize_point_cloud, visible_points, PointCloud, FACE_JITTER, WALL_LEVELS};
pub use grid::{Cell, GridMap};
pub use lidar::{raycast_scan, LidarConfig, ScanResult};
pub use raster::{line_of_sight, walk_ray};
pub use robot::{step_robot, RobotState};
pub use scene::{load_scene, render_map, Pose, Scene};
