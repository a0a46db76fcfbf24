//! Ground-truth and known occupancy grids, the simulated planar LiDAR, and
//! grid path planning.
//!
//! World coordinates are meters with +y pointing up. Cell `(0, 0)` occupies
//! `[origin.x, origin.x + resolution) x [origin.y, origin.y + resolution)`.

mod map_file;
mod planner;
mod raycast;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use map_file::{load_map, LoadedMap, MapParseError};
pub use planner::{plan_path, CostField, PathPlan, TraversabilityMask};
pub(crate) use planner::plan_path_with_mask;
pub use raycast::{integrate_scan, simulate_scan, supercover_cells, PolarScan, ScanReturn, TraversedCell};

/// State of a single grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    Free,
    Unknown,
    Occupied,
}

impl CellState {
    pub fn is_known(self) -> bool {
        self != CellState::Unknown
    }
}

/// A point in world meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Point reached by travelling `range` meters from `self` along bearing `theta`.
    pub fn offset_polar(self, theta: f64, range: f64) -> Point {
        Point::new(self.x + range * theta.cos(), self.y + range * theta.sin())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3})", self.x, self.y)
    }
}

/// Integer cell index. May lie outside a grid; use [`OccupancyGrid::contains`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Cell {
        Cell::new(self.x + dx, self.y + dy)
    }

    pub fn chebyshev(self, other: Cell) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }
}

/// 8-neighbourhood offsets, orthogonal moves first.
pub const NEIGHBORS_8: [(i32, i32); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

/// 4-neighbourhood offsets.
pub const NEIGHBORS_4: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Robot pose; heading is kept normalized to `[-pi, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: normalize_angle(heading),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Wraps an angle into `[-pi, pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2*pi for tiny negative inputs.
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid dimensions must be positive (got {width}x{height}, resolution {resolution})")]
    InvalidDimensions {
        width: usize,
        height: usize,
        resolution: f64,
    },
    #[error("cell buffer has {actual} entries, expected {expected}")]
    CellCount { expected: usize, actual: usize },
    #[error("pose ({x:.3}, {y:.3}) is not inside a free cell")]
    InvalidPose { x: f64, y: f64 },
}

/// Row-major 2D occupancy lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point,
    cells: Vec<CellState>,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point,
        fill: CellState,
    ) -> Result<Self, GridError> {
        Self::from_cells(width, height, resolution, origin, vec![fill; width * height])
    }

    pub fn from_cells(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point,
        cells: Vec<CellState>,
    ) -> Result<Self, GridError> {
        if width == 0 || height == 0 || !(resolution > 0.0) || !resolution.is_finite() {
            return Err(GridError::InvalidDimensions {
                width,
                height,
                resolution,
            });
        }
        if cells.len() != width * height {
            return Err(GridError::CellCount {
                expected: width * height,
                actual: cells.len(),
            });
        }
        Ok(Self {
            width,
            height,
            resolution,
            origin,
            cells,
        })
    }

    /// An all-Unknown grid with the same geometry as `self`.
    pub fn unknown_like(&self) -> Self {
        Self {
            cells: vec![CellState::Unknown; self.cells.len()],
            ..self.clone()
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

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    /// World extent as `(min corner, max corner)`.
    pub fn extent(&self) -> (Point, Point) {
        (
            self.origin,
            Point::new(
                self.origin.x + self.width as f64 * self.resolution,
                self.origin.y + self.height as f64 * self.resolution,
            ),
        )
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x >= 0 && cell.y >= 0 && (cell.x as usize) < self.width && (cell.y as usize) < self.height
    }

    pub fn contains_point(&self, p: Point) -> bool {
        self.contains(self.cell_of(p))
    }

    pub fn index(&self, cell: Cell) -> Option<usize> {
        self.contains(cell)
            .then(|| cell.y as usize * self.width + cell.x as usize)
    }

    pub fn cell_at_index(&self, index: usize) -> Cell {
        Cell::new((index % self.width) as i32, (index / self.width) as i32)
    }

    pub fn get(&self, cell: Cell) -> Option<CellState> {
        self.index(cell).map(|i| self.cells[i])
    }

    /// State of `cell`, with out-of-map cells reported as Unknown.
    pub fn state_or_unknown(&self, cell: Cell) -> CellState {
        self.get(cell).unwrap_or(CellState::Unknown)
    }

    pub fn set(&mut self, cell: Cell, state: CellState) {
        if let Some(i) = self.index(cell) {
            self.cells[i] = state;
        }
    }

    pub fn cell_of(&self, p: Point) -> Cell {
        Cell::new(
            ((p.x - self.origin.x) / self.resolution).floor() as i32,
            ((p.y - self.origin.y) / self.resolution).floor() as i32,
        )
    }

    pub fn cell_center(&self, cell: Cell) -> Point {
        Point::new(
            self.origin.x + (cell.x as f64 + 0.5) * self.resolution,
            self.origin.y + (cell.y as f64 + 0.5) * self.resolution,
        )
    }

    pub fn state_at(&self, p: Point) -> Option<CellState> {
        self.get(self.cell_of(p))
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|&&s| s == state).count()
    }

    pub fn known_count(&self) -> usize {
        self.cells.iter().filter(|s| s.is_known()).count()
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = (Cell, CellState)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, &s)| (self.cell_at_index(i), s))
    }

    /// Cells whose centers lie within `radius` meters of `center`, in row-major order.
    pub fn cells_in_disk(&self, center: Point, radius: f64) -> impl Iterator<Item = Cell> + '_ {
        let c = self.cell_of(center);
        let reach = (radius / self.resolution).ceil() as i32 + 1;
        let x0 = (c.x - reach).max(0);
        let x1 = (c.x + reach).min(self.width as i32 - 1);
        let y0 = (c.y - reach).max(0);
        let y1 = (c.y + reach).min(self.height as i32 - 1);
        (y0..=y1)
            .flat_map(move |y| (x0..=x1).map(move |x| Cell::new(x, y)))
            .filter(move |&cell| self.cell_center(cell).distance(center) <= radius)
    }

    /// True when any cell in the Chebyshev square of half-size `radius` around `cell` has `state`.
    pub fn any_in_square(&self, cell: Cell, radius: i32, state: CellState) -> bool {
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                if self.get(cell.offset(dx, dy)) == Some(state) {
                    return true;
                }
            }
        }
        false
    }

    /// Free cell with at least one 8-adjacent Unknown cell (out-of-map neighbours ignored).
    pub fn is_frontier_cell(&self, cell: Cell) -> bool {
        self.get(cell) == Some(CellState::Free)
            && NEIGHBORS_8
                .iter()
                .any(|&(dx, dy)| self.get(cell.offset(dx, dy)) == Some(CellState::Unknown))
    }

    /// Unknown cell with at least one 4-adjacent Free cell: the boundary that
    /// a sensor can still observe. Unknown cells walled in on all four sides
    /// (wall interiors, inner room corners) never qualify.
    pub fn is_open_unknown(&self, cell: Cell) -> bool {
        self.get(cell) == Some(CellState::Unknown)
            && NEIGHBORS_4
                .iter()
                .any(|&(dx, dy)| self.get(cell.offset(dx, dy)) == Some(CellState::Free))
    }

    /// True when an open Unknown cell (see [`Self::is_open_unknown`]) has its
    /// center within `radius` meters of `p`.
    pub fn has_open_unknown_within(&self, p: Point, radius: f64) -> bool {
        self.cells_in_disk(p, radius).any(|c| self.is_open_unknown(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heading_is_normalized() {
        assert!((Pose::new(0.0, 0.0, 3.0 * PI).heading + PI).abs() < 1e-12);
        assert_eq!(Pose::new(0.0, 0.0, PI).heading, -PI);
        assert!((Pose::new(0.0, 0.0, -PI / 2.0).heading + PI / 2.0).abs() < 1e-15);
        let h = normalize_angle(-1e-18);
        assert!((-PI..PI).contains(&h));
    }

    #[test]
    fn rejects_bad_dimensions() {
        let o = Point::default();
        assert!(OccupancyGrid::new(0, 3, 0.1, o, CellState::Free).is_err());
        assert!(OccupancyGrid::new(3, 3, 0.0, o, CellState::Free).is_err());
        assert!(OccupancyGrid::from_cells(2, 2, 0.1, o, vec![CellState::Free; 3]).is_err());
    }

    #[test]
    fn world_cell_round_trip() {
        let g = OccupancyGrid::new(20, 10, 0.25, Point::new(-1.0, 2.0), CellState::Unknown).unwrap();
        for (cell, _) in g.iter_cells() {
            assert_eq!(g.cell_of(g.cell_center(cell)), cell);
        }
        assert_eq!(g.cell_of(Point::new(-1.0, 2.0)), Cell::new(0, 0));
        assert!(!g.contains_point(Point::new(-1.01, 2.0)));
        assert!(!g.contains_point(Point::new(4.0, 2.0)));
    }

    #[test]
    fn disk_iteration_respects_radius() {
        let g = OccupancyGrid::new(50, 50, 0.1, Point::default(), CellState::Free).unwrap();
        let c = Point::new(2.55, 2.55);
        let n = g.cells_in_disk(c, 0.5).count();
        let brute = g
            .iter_cells()
            .filter(|(cell, _)| g.cell_center(*cell).distance(c) <= 0.5)
            .count();
        assert_eq!(n, brute);
    }
}
