use nalgebra::Point2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Belief (or ground truth) state of a single grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    Unknown,
    Free,
    Occupied,
}

impl Cell {
    pub fn is_known(self) -> bool {
        self != Cell::Unknown
    }
}

const OFFSETS_4: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const OFFSETS_8: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1)];

/// Row-major occupancy grid. Cell `(x, y)` covers
/// `[x * res, (x + 1) * res) × [y * res, (y + 1) * res)` in world meters.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMap {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<Cell>,
}

impl GridMap {
    pub fn new(width: usize, height: usize, resolution: f64) -> Self {
        Self::filled(width, height, resolution, Cell::Unknown)
    }

    pub fn filled(width: usize, height: usize, resolution: f64, cell: Cell) -> Self {
        assert!(resolution > 0.0 && resolution.is_finite());
        Self {
            width,
            height,
            resolution,
            cells: vec![cell; width * height],
        }
    }

    /// Builds a grid from row-major cells.
    pub fn from_cells(width: usize, height: usize, resolution: f64, cells: Vec<Cell>) -> Self {
        assert_eq!(cells.len(), width * height);
        Self {
            width,
            height,
            resolution,
            cells,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    #[inline]
    pub fn get(&self, idx: usize) -> Cell {
        self.cells[idx]
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Cell {
        self.cells[self.index(x, y)]
    }

    #[inline]
    pub fn is_free(&self, idx: usize) -> bool {
        self.cells[idx] == Cell::Free
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    /// World position of the center of cell `idx`.
    pub fn center(&self, idx: usize) -> Point2<f64> {
        let (x, y) = self.coords(idx);
        Point2::new((x as f64 + 0.5) * self.resolution, (y as f64 + 0.5) * self.resolution)
    }

    /// Cell containing a world position, or `None` outside the grid.
    pub fn cell_at(&self, p: Point2<f64>) -> Option<usize> {
        let fx = (p.x / self.resolution).floor();
        let fy = (p.y / self.resolution).floor();
        if !(fx >= 0.0 && fy >= 0.0) || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some(self.index(fx as usize, fy as usize))
    }

    pub fn try_cell_at(&self, p: Point2<f64>) -> Result<usize> {
        self.cell_at(p).ok_or(Error::OutsideGrid { x: p.x, y: p.y })
    }

    pub fn neighbors4(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.offset_neighbors(idx, &OFFSETS_4)
    }

    pub fn neighbors8(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.offset_neighbors(idx, &OFFSETS_8)
    }

    fn offset_neighbors<'a>(&'a self, idx: usize, offsets: &'static [(isize, isize)]) -> impl Iterator<Item = usize> + 'a {
        let (x, y) = self.coords(idx);
        offsets.iter().filter_map(move |&(dx, dy)| {
            let nx = x.checked_add_signed(dx)?;
            let ny = y.checked_add_signed(dy)?;
            (nx < self.width && ny < self.height).then(|| ny * self.width + nx)
        })
    }

    /// Records an observation. Only `Unknown` cells change; known cells keep
    /// their belief. Returns whether the cell changed.
    pub fn observe(&mut self, idx: usize, state: Cell) -> bool {
        debug_assert!(state.is_known());
        if self.cells[idx] == Cell::Unknown {
            self.cells[idx] = state;
            true
        } else {
            false
        }
    }

    pub fn count(&self, state: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == state).count()
    }
}

#[cfg(test)]
impl GridMap {
    pub(crate) fn cells_mut_for_test(&mut self) -> &mut [Cell] {
        &mut self.cells
    }
}
