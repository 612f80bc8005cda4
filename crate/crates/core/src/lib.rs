//! Frontier-based autonomous exploration on occupancy grids.
//!
//! The planner keeps its frontier set up to date incrementally, detects
//! enclosed sub-regions around the robot from wall normals, scores sampled
//! viewpoints by gain and three costs (sub-region, path length, heading
//! change), merges nearby viewpoints, and orders them with an asymmetric TSP
//! tour. A grid-world LiDAR simulator drives it end to end.

pub mod error;
pub mod frontier;
pub mod planner;
pub mod routing;
pub mod spatial;
pub mod subregion;
pub mod viewpoint;
pub mod world;

pub use error::{Error, Result, SceneError};
