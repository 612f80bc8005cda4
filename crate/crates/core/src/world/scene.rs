//! Ground-truth scenes and their text format.
//!
//! ```text
//! resolution 0.5
//! #####
//! #S..#
//! #####
//! ```
//!
//! `#` is a wall, `.` free space, `S` the (free) start cell. The first grid
//! line is the top row, i.e. the largest `y`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use super::grid::{Cell, GridMap};
use crate::error::SceneError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn position(&self) -> Point2<f64> {
        Point2::new(self.x, self.y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    truth: GridMap,
    start: Pose,
}

impl Scene {
    /// Builds a scene from a ground-truth grid, checking the sealed-boundary
    /// and free-start invariants.
    pub fn new(truth: GridMap, start_cell: usize) -> Result<Self, SceneError> {
        let (w, h) = (truth.width(), truth.height());
        for idx in 0..truth.len() {
            let (x, y) = truth.coords(idx);
            let boundary = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
            match truth.get(idx) {
                Cell::Unknown => panic!("ground truth cannot contain Unknown cells"),
                Cell::Free if boundary => return Err(SceneError::Unsealed { row: h - 1 - y, col: x }),
                _ => {}
            }
        }
        if truth.get(start_cell) != Cell::Free {
            return Err(SceneError::NoStart);
        }
        let c = truth.center(start_cell);
        Ok(Self {
            truth,
            start: Pose { x: c.x, y: c.y, heading: 0.0 },
        })
    }

    pub fn truth(&self) -> &GridMap {
        &self.truth
    }

    pub fn width(&self) -> usize {
        self.truth.width()
    }

    pub fn height(&self) -> usize {
        self.truth.height()
    }

    pub fn resolution(&self) -> f64 {
        self.truth.resolution()
    }

    pub fn start_pose(&self) -> Pose {
        self.start
    }

    pub fn start_cell(&self) -> usize {
        self.truth.cell_at(self.start.position()).expect("start pose lies inside the grid")
    }

    pub fn free_count(&self) -> usize {
        self.truth.count(Cell::Free)
    }

    /// Ground-truth free cells 4-connected to the start cell.
    pub fn reachable_free(&self) -> Vec<bool> {
        let mut seen = vec![false; self.truth.len()];
        let start = self.start_cell();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for n in self.truth.neighbors4(c) {
                if !seen[n] && self.truth.get(n) == Cell::Free {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// Serializes to the scene text format; `load_scene(s.to_text())` returns `s`.
    pub fn to_text(&self) -> String {
        let mut out = format!("resolution {}\n", self.resolution());
        let start = self.start_cell();
        for y in (0..self.height()).rev() {
            for x in 0..self.width() {
                let idx = self.truth.index(x, y);
                let ch = match self.truth.get(idx) {
                    _ if idx == start => 'S',
                    Cell::Free => '.',
                    _ => '#',
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

/// Parses the scene text format.
pub fn load_scene(text: &str) -> Result<Scene, SceneError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(SceneError::MissingHeader)?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("resolution") {
        return Err(SceneError::MissingHeader);
    }
    let raw = parts.next().ok_or(SceneError::MissingHeader)?;
    let resolution: f64 = raw.parse().map_err(|_| SceneError::BadResolution(raw.to_string()))?;
    if !(resolution > 0.0 && resolution.is_finite()) || parts.next().is_some() {
        return Err(SceneError::BadResolution(raw.to_string()));
    }

    let rows: Vec<&str> = lines.map(|l| l.trim_end_matches('\r')).filter(|l| !l.is_empty()).collect();
    if rows.is_empty() {
        return Err(SceneError::EmptyGrid);
    }
    let width = rows[0].chars().count();
    let height = rows.len();
    let mut cells = vec![Cell::Occupied; width * height];
    let mut start = None;
    for (row, line) in rows.iter().enumerate() {
        let found = line.chars().count();
        if found != width {
            return Err(SceneError::RaggedRow { row, expected: width, found });
        }
        let y = height - 1 - row;
        for (col, ch) in line.chars().enumerate() {
            let idx = y * width + col;
            cells[idx] = match ch {
                '#' => Cell::Occupied,
                '.' => Cell::Free,
                'S' => {
                    if start.is_some() {
                        return Err(SceneError::MultipleStarts { row, col });
                    }
                    start = Some(idx);
                    Cell::Free
                }
                _ => return Err(SceneError::BadChar { row, col, ch }),
            };
        }
    }
    let start = start.ok_or(SceneError::NoStart)?;
    let truth = GridMap::from_cells(width, height, resolution, cells);
    Scene::new(truth, start)
}

/// Renders a belief grid as text: `?` unknown, `.` free, `#` occupied.
/// Rows are written top (largest `y`) first, matching the scene format.
pub fn render_map(map: &GridMap) -> String {
    let mut out = String::with_capacity((map.width() + 1) * map.height() + 32);
    let _ = writeln!(out, "# {} {} {}", map.width(), map.height(), map.resolution());
    for y in (0..map.height()).rev() {
        for x in 0..map.width() {
            out.push(match map.at(x, y) {
                Cell::Unknown => '?',
                Cell::Free => '.',
                Cell::Occupied => '#',
            });
        }
        out.push('\n');
    }
    out
}
