//! Deterministic scene generators used by tests, benchmarks and the scene corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grid::{Cell, GridMap};
use super::scene::Scene;

struct Canvas {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
}

impl Canvas {
    fn walls(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![Cell::Occupied; width * height],
        }
    }

    fn fill(&mut self, x0: usize, y0: usize, x1: usize, y1: usize, cell: Cell) {
        for y in y0..y1.min(self.height) {
            for x in x0..x1.min(self.width) {
                self.cells[y * self.width + x] = cell;
            }
        }
    }

    fn seal(&mut self) {
        let (w, h) = (self.width, self.height);
        self.fill(0, 0, w, 1, Cell::Occupied);
        self.fill(0, h - 1, w, h, Cell::Occupied);
        self.fill(0, 0, 1, h, Cell::Occupied);
        self.fill(w - 1, 0, w, h, Cell::Occupied);
    }

    fn into_scene(mut self, resolution: f64, start: (usize, usize)) -> Scene {
        self.seal();
        let idx = start.1 * self.width + start.0;
        self.cells[idx] = Cell::Free;
        let grid = GridMap::from_cells(self.width, self.height, resolution, self.cells);
        Scene::new(grid, idx).expect("generator produces sealed scenes")
    }
}

/// Rectangular room: a one-cell wall ring around free space, start at the center cell.
pub fn open_room(width: usize, height: usize, resolution: f64) -> Scene {
    assert!(width >= 3 && height >= 3);
    let mut c = Canvas::walls(width, height);
    c.fill(1, 1, width - 1, height - 1, Cell::Free);
    c.into_scene(resolution, (width / 2, height / 2))
}

/// Perfect maze (randomized depth-first carving) on a `cols × rows` lattice of
/// `corridor`-cell-wide passages separated by one-cell walls. The start is the
/// center of the bottom-left passage cell.
pub fn maze(cols: usize, rows: usize, corridor: usize, resolution: f64, seed: u64) -> Scene {
    assert!(cols > 0 && rows > 0 && corridor > 0);
    let pitch = corridor + 1;
    let (w, h) = (cols * pitch + 1, rows * pitch + 1);
    let mut c = Canvas::walls(w, h);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = |i: usize, j: usize| (i * pitch + 1, j * pitch + 1);

    let mut visited = vec![false; cols * rows];
    let mut stack = vec![(0usize, 0usize)];
    visited[0] = true;
    let (x0, y0) = origin(0, 0);
    c.fill(x0, y0, x0 + corridor, y0 + corridor, Cell::Free);
    while let Some(&(i, j)) = stack.last() {
        let mut next: Vec<(usize, usize)> = Vec::new();
        if i > 0 {
            next.push((i - 1, j));
        }
        if i + 1 < cols {
            next.push((i + 1, j));
        }
        if j > 0 {
            next.push((i, j - 1));
        }
        if j + 1 < rows {
            next.push((i, j + 1));
        }
        next.retain(|&(a, b)| !visited[b * cols + a]);
        let Some(&(a, b)) = next.choose(&mut rng) else {
            stack.pop();
            continue;
        };
        visited[b * cols + a] = true;
        let (ax, ay) = origin(a, b);
        c.fill(ax, ay, ax + corridor, ay + corridor, Cell::Free);
        // knock down the wall between the two passage cells
        let (px, py) = origin(i, j);
        let (lx, ly) = (px.min(ax), py.min(ay));
        c.fill(lx, ly, lx.max(ax.max(px)) + corridor, ly.max(ay.max(py)) + corridor, Cell::Free);
        stack.push((a, b));
    }
    c.into_scene(resolution, (1 + corridor / 2, 1 + corridor / 2))
}

/// Parameters for [`rooms`].
#[derive(Clone, Copy, Debug)]
pub struct RoomsLayout {
    /// Number of rooms along x and y.
    pub rooms_x: usize,
    pub rooms_y: usize,
    /// Interior size of each room in cells.
    pub room_w: usize,
    pub room_h: usize,
    /// Door width in cells.
    pub door: usize,
    /// Probability of an extra door on walls outside the spanning tree.
    pub extra_doors: f64,
    /// Probability that a room gets a partial dividing wall forming an alcove.
    pub alcoves: f64,
    /// Pillars per room (single cells kept two cells from any wall).
    pub pillars: usize,
}

impl Default for RoomsLayout {
    fn default() -> Self {
        Self {
            rooms_x: 4,
            rooms_y: 3,
            room_w: 16,
            room_h: 14,
            door: 3,
            extra_doors: 0.3,
            alcoves: 0.5,
            pillars: 1,
        }
    }
}

/// Grid of walled rooms joined by doors (a random spanning tree plus extra
/// doors), with optional alcoves and pillars. Every room is an enclosed
/// sub-region; the start is the center of the bottom-left room.
pub fn rooms(layout: &RoomsLayout, resolution: f64, seed: u64) -> Scene {
    let RoomsLayout {
        rooms_x: nx,
        rooms_y: ny,
        room_w: rw,
        room_h: rh,
        door,
        ..
    } = *layout;
    assert!(nx > 0 && ny > 0 && rw >= 5 && rh >= 5 && door >= 1 && door + 2 <= rw.min(rh));
    let (w, h) = (nx * (rw + 1) + 1, ny * (rh + 1) + 1);
    let mut c = Canvas::walls(w, h);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = |i: usize, j: usize| (i * (rw + 1) + 1, j * (rh + 1) + 1);
    for j in 0..ny {
        for i in 0..nx {
            let (x, y) = origin(i, j);
            c.fill(x, y, x + rw, y + rh, Cell::Free);
        }
    }

    // Walls between adjacent rooms, as (room a, room b, vertical wall?).
    let mut edges = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                edges.push(((i, j), (i + 1, j), true));
            }
            if j + 1 < ny {
                edges.push(((i, j), (i, j + 1), false));
            }
        }
    }
    edges.shuffle(&mut rng);
    let mut parent: Vec<usize> = (0..nx * ny).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for &((ai, aj), (bi, bj), vertical) in &edges {
        let (ra, rb) = (find(&mut parent, aj * nx + ai), find(&mut parent, bj * nx + bi));
        let in_tree = ra != rb;
        if in_tree {
            parent[ra] = rb;
        }
        if !in_tree && !rng.gen_bool(layout.extra_doors) {
            continue;
        }
        let (x, y) = origin(ai, aj);
        if vertical {
            let wall_x = x + rw;
            let off = rng.gen_range(1..=rh - door - 1);
            c.fill(wall_x, y + off, wall_x + 1, y + off + door, Cell::Free);
        } else {
            let wall_y = y + rh;
            let off = rng.gen_range(1..=rw - door - 1);
            c.fill(x + off, wall_y, x + off + door, wall_y + 1, Cell::Free);
        }
    }

    let start_room = (0, 0);
    for j in 0..ny {
        for i in 0..nx {
            let (x, y) = origin(i, j);
            if (i, j) != start_room && rng.gen_bool(layout.alcoves) {
                // partial wall parallel to one room side, leaving a gap at one end
                let horizontal = rng.gen_bool(0.5);
                if horizontal {
                    let wy = y + rh / 3 + rng.gen_range(0..=rh / 3);
                    let len = rw * 3 / 5;
                    let x0 = if rng.gen_bool(0.5) { x } else { x + rw - len };
                    c.fill(x0, wy, x0 + len, wy + 1, Cell::Occupied);
                } else {
                    let wx = x + rw / 3 + rng.gen_range(0..=rw / 3);
                    let len = rh * 3 / 5;
                    let y0 = if rng.gen_bool(0.5) { y } else { y + rh - len };
                    c.fill(wx, y0, wx + 1, y0 + len, Cell::Occupied);
                }
            }
            for _ in 0..layout.pillars {
                let px = x + rng.gen_range(3..rw - 3);
                let py = y + rng.gen_range(3..rh - 3);
                if (i, j) == start_room && (px, py) == (x + rw / 2, y + rh / 2) {
                    continue;
                }
                c.fill(px, py, px + 1, py + 1, Cell::Occupied);
            }
        }
    }
    let (sx, sy) = origin(0, 0);
    c.into_scene(resolution, (sx + rw / 2, sy + rh / 2))
}

/// Random sealed clutter: rectangles and wall segments dropped on an open
/// floor. Parts of the floor may be sealed off. The start is a random free
/// cell.
pub fn random_scene(width: usize, height: usize, resolution: f64, seed: u64) -> Scene {
    assert!(width >= 5 && height >= 5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Canvas::walls(width, height);
    c.fill(1, 1, width - 1, height - 1, Cell::Free);
    let area = width * height;
    let blocks = area / 60 + 1;
    for _ in 0..blocks {
        let x = rng.gen_range(1..width - 1);
        let y = rng.gen_range(1..height - 1);
        if rng.gen_bool(0.5) {
            let (bw, bh) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            c.fill(x, y, x + bw, y + bh, Cell::Occupied);
        } else if rng.gen_bool(0.5) {
            let len = rng.gen_range(3..=width / 2 + 3);
            c.fill(x, y, x + len, y + 1, Cell::Occupied);
        } else {
            let len = rng.gen_range(3..=height / 2 + 3);
            c.fill(x, y, x + 1, y + len, Cell::Occupied);
        }
    }
    let free: Vec<usize> = (0..area)
        .filter(|&i| {
            let (x, y) = (i % width, i / width);
            x > 0 && y > 0 && x + 1 < width && y + 1 < height && c.cells[i] == Cell::Free
        })
        .collect();
    let start = match free.choose(&mut rng) {
        Some(&i) => (i % width, i / width),
        None => (width / 2, height / 2),
    };
    c.into_scene(resolution, start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maze_is_connected() {
        let s = maze(9, 9, 6, 0.5, 11);
        assert_eq!((s.width(), s.height()), (64, 64));
        let reach = s.reachable_free().iter().filter(|&&r| r).count();
        assert_eq!(reach, s.free_count());
    }

    #[test]
    fn rooms_are_connected() {
        for seed in 0..5 {
            let layout = RoomsLayout {
                pillars: 0,
                ..RoomsLayout::default()
            };
            let s = rooms(&layout, 0.5, seed);
            let reach = s.reachable_free().iter().filter(|&&r| r).count();
            assert_eq!(reach, s.free_count(), "seed {seed}");
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_scene(30, 20, 0.5, 4), random_scene(30, 20, 0.5, 4));
        assert_eq!(rooms(&RoomsLayout::default(), 0.5, 2), rooms(&RoomsLayout::default(), 0.5, 2));
    }
}

/// Crafted wall layouts around a robot, used to exercise sub-region detection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Enclosure {
    /// Closed `w × h` meter room whose center is offset from the robot by `(dx, dy)`.
    Room { w: f64, h: f64, dx: f64, dy: f64 },
    /// Room with the wall on one side removed; `open` is the outward normal of
    /// the missing wall: `(1, 0)`, `(-1, 0)`, `(0, 1)` or `(0, -1)`.
    URoom { w: f64, h: f64, open: (i32, i32) },
    /// Straight corridor of the given width through the whole area.
    Corridor { width: f64, along_x: bool, dy: f64 },
    /// No walls near the robot; optionally a few isolated pillars.
    OpenField { pillars: bool },
    /// One straight wall of the given length, `distance` meters from the robot.
    SingleWall { length: f64, distance: f64 },
}

/// A fully observed map for an [`Enclosure`] with the robot at its center.
#[derive(Clone, Debug)]
pub struct EnclosureFixture {
    pub map: GridMap,
    pub robot: nalgebra::Point2<f64>,
    /// Inner wall faces of the enclosure, when it is one.
    pub expected: Option<crate::subregion::Bounds>,
}

/// Builds the map for `kind` on a 40 m square at `resolution`. Cells that a
/// robot at the center could not see (behind walls) stay `Unknown`.
pub fn enclosure(kind: Enclosure, resolution: f64) -> EnclosureFixture {
    use crate::subregion::Bounds;
    let size = 40.0;
    let n = (size / resolution).round() as usize;
    let center = nalgebra::Point2::new(size / 2.0, size / 2.0);
    let cell = |v: f64| (v / resolution).round() as i64;
    let mut cells = vec![Cell::Unknown; n * n];
    let put = |x0: f64, x1: f64, y0: f64, y1: f64, c: Cell, cells: &mut Vec<Cell>| {
        for y in cell(y0).max(0)..cell(y1).min(n as i64) {
            for x in cell(x0).max(0)..cell(x1).min(n as i64) {
                cells[y as usize * n + x as usize] = c;
            }
        }
    };
    let t = resolution;
    let expected = match kind {
        Enclosure::Room { w, h, dx, dy } => {
            let (x0, x1) = (center.x + dx - w / 2.0, center.x + dx + w / 2.0);
            let (y0, y1) = (center.y + dy - h / 2.0, center.y + dy + h / 2.0);
            put(x0 - t, x1 + t, y0 - t, y1 + t, Cell::Occupied, &mut cells);
            put(x0, x1, y0, y1, Cell::Free, &mut cells);
            Some(Bounds::new(x0, x1, y0, y1))
        }
        Enclosure::URoom { w, h, open } => {
            let (x0, x1) = (center.x - w / 2.0, center.x + w / 2.0);
            let (y0, y1) = (center.y - h / 2.0, center.y + h / 2.0);
            put(x0 - t, x1 + t, y0 - t, y1 + t, Cell::Occupied, &mut cells);
            put(x0, x1, y0, y1, Cell::Free, &mut cells);
            match open {
                (1, 0) => put(x1, x1 + t, y0, y1, Cell::Free, &mut cells),
                (-1, 0) => put(x0 - t, x0, y0, y1, Cell::Free, &mut cells),
                (0, 1) => put(x0, x1, y1, y1 + t, Cell::Free, &mut cells),
                (0, -1) => put(x0, x1, y0 - t, y0, Cell::Free, &mut cells),
                _ => panic!("open side must be an axis direction"),
            }
            Some(Bounds::new(x0, x1, y0, y1))
        }
        Enclosure::Corridor { width, along_x, dy } => {
            let (a0, a1) = (center.y + dy - width / 2.0, center.y + dy + width / 2.0);
            if along_x {
                put(0.0, size, a0 - t, a1 + t, Cell::Occupied, &mut cells);
                put(0.0, size, a0, a1, Cell::Free, &mut cells);
            } else {
                put(a0 - t, a1 + t, 0.0, size, Cell::Occupied, &mut cells);
                put(a0, a1, 0.0, size, Cell::Free, &mut cells);
            }
            None
        }
        Enclosure::OpenField { pillars } => {
            put(0.0, size, 0.0, size, Cell::Free, &mut cells);
            if pillars {
                for (px, py) in [(-6.0, 4.0), (5.0, 7.0), (7.5, -5.0), (-4.0, -7.0)] {
                    put(center.x + px, center.x + px + t, center.y + py, center.y + py + t, Cell::Occupied, &mut cells);
                }
            }
            None
        }
        Enclosure::SingleWall { length, distance } => {
            put(0.0, size, 0.0, size, Cell::Free, &mut cells);
            put(
                center.x + distance,
                center.x + distance + t,
                center.y - length / 2.0,
                center.y + length / 2.0,
                Cell::Occupied,
                &mut cells,
            );
            None
        }
    };
    EnclosureFixture {
        map: GridMap::from_cells(n, n, resolution, cells),
        robot: center,
        expected,
    }
}
