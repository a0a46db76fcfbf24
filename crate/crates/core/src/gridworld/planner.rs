//! 8-connected grid planning with an obstacle clearance margin.
//!
//! A cell is traversable when no known Occupied cell lies within Chebyshev
//! distance `clearance` of it. Unknown cells are traversable but cost twice
//! as much to enter. Diagonal moves may not cut an Occupied corner.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use super::{Cell, CellState, OccupancyGrid, Point, Pose, NEIGHBORS_8};

/// Cost multiplier for entering an Unknown cell.
pub const UNKNOWN_COST_FACTOR: f64 = 2.0;

/// Per-cell traversability for a given clearance.
#[derive(Clone, Debug)]
pub struct TraversabilityMask {
    width: usize,
    height: usize,
    clearance: i32,
    traversable: Vec<bool>,
}

impl TraversabilityMask {
    pub fn new(known: &OccupancyGrid, clearance: usize) -> Self {
        let (w, h) = (known.width(), known.height());
        // Summed-area table of Occupied counts, padded by one row/column.
        let mut sat = vec![0u32; (w + 1) * (h + 1)];
        for y in 0..h {
            let mut row = 0u32;
            for x in 0..w {
                row += (known.cells()[y * w + x] == CellState::Occupied) as u32;
                sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
            }
        }
        let c = clearance as i64;
        let mut traversable = vec![false; w * h];
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let x0 = (x - c).max(0) as usize;
                let y0 = (y - c).max(0) as usize;
                let x1 = ((x + c).min(w as i64 - 1) + 1) as usize;
                let y1 = ((y + c).min(h as i64 - 1) + 1) as usize;
                let occ = sat[y1 * (w + 1) + x1] + sat[y0 * (w + 1) + x0]
                    - sat[y0 * (w + 1) + x1]
                    - sat[y1 * (w + 1) + x0];
                traversable[y as usize * w + x as usize] = occ == 0;
            }
        }
        Self {
            width: w,
            height: h,
            clearance: clearance as i32,
            traversable,
        }
    }

    pub fn clearance(&self) -> i32 {
        self.clearance
    }

    pub fn is_traversable(&self, cell: Cell) -> bool {
        cell.x >= 0
            && cell.y >= 0
            && (cell.x as usize) < self.width
            && (cell.y as usize) < self.height
            && self.traversable[cell.y as usize * self.width + cell.x as usize]
    }
}

/// Cost of the move `from -> from + (dx, dy)`, or `None` when it is not allowed.
fn step_cost(
    known: &OccupancyGrid,
    mask: &TraversabilityMask,
    from: Cell,
    dx: i32,
    dy: i32,
) -> Option<(Cell, f64)> {
    let to = from.offset(dx, dy);
    if !mask.is_traversable(to) {
        return None;
    }
    let diagonal = dx != 0 && dy != 0;
    if diagonal
        && (known.get(from.offset(dx, 0)) == Some(CellState::Occupied)
            || known.get(from.offset(0, dy)) == Some(CellState::Occupied))
    {
        return None;
    }
    let mut cost = known.resolution() * if diagonal { SQRT_2 } else { 1.0 };
    if known.get(to) == Some(CellState::Unknown) {
        cost *= UNKNOWN_COST_FACTOR;
    }
    Some((to, cost))
}

#[derive(Clone, Copy, PartialEq)]
struct QueueEntry {
    priority: f64,
    index: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on priority, then on index for deterministic expansion order.
        other
            .priority
            .total_cmp(&self.priority)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A planned path from the robot's cell to the goal cell.
#[derive(Clone, Debug, PartialEq)]
pub struct PathPlan {
    pub cells: Vec<Cell>,
    /// Cell-center waypoints, one per cell, starting with the robot's cell.
    pub waypoints: Vec<Point>,
    /// Accumulated move cost in meters (Unknown cells weighted).
    pub cost: f64,
}

/// A* from the robot's cell to the cell containing `to`. Returns `None` when
/// the goal is out of bounds, not traversable, or disconnected.
pub fn plan_path(known: &OccupancyGrid, from: &Pose, to: Point, clearance: usize) -> Option<PathPlan> {
    let mask = TraversabilityMask::new(known, clearance);
    plan_path_with_mask(known, &mask, from.position(), to)
}

pub(crate) fn plan_path_with_mask(
    known: &OccupancyGrid,
    mask: &TraversabilityMask,
    from: Point,
    to: Point,
) -> Option<PathPlan> {
    let start = known.cell_of(from);
    let goal = known.cell_of(to);
    let start_idx = known.index(start)?;
    if start == goal {
        return Some(PathPlan {
            cells: vec![start],
            waypoints: vec![known.cell_center(start)],
            cost: 0.0,
        });
    }
    let goal_idx = known.index(goal)?;
    if !mask.is_traversable(goal) {
        return None;
    }
    let res = known.resolution();
    let heuristic = |c: Cell| {
        let dx = (c.x - goal.x).abs() as f64;
        let dy = (c.y - goal.y).abs() as f64;
        res * (dx.max(dy) + (SQRT_2 - 1.0) * dx.min(dy))
    };

    let n = known.width() * known.height();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    g[start_idx] = 0.0;
    open.push(QueueEntry {
        priority: heuristic(start),
        index: start_idx,
    });
    while let Some(QueueEntry { index, .. }) = open.pop() {
        if closed[index] {
            continue;
        }
        if index == goal_idx {
            break;
        }
        closed[index] = true;
        let cell = known.cell_at_index(index);
        for &(dx, dy) in &NEIGHBORS_8 {
            let Some((next, cost)) = step_cost(known, mask, cell, dx, dy) else {
                continue;
            };
            let ni = known.index(next).expect("traversable cells are in bounds");
            let candidate = g[index] + cost;
            if candidate < g[ni] {
                g[ni] = candidate;
                parent[ni] = index;
                open.push(QueueEntry {
                    priority: candidate + heuristic(next),
                    index: ni,
                });
            }
        }
    }
    if !g[goal_idx].is_finite() {
        return None;
    }
    let mut cells = vec![goal];
    let mut at = goal_idx;
    while at != start_idx {
        at = parent[at];
        cells.push(known.cell_at_index(at));
    }
    cells.reverse();
    let waypoints = cells.iter().map(|&c| known.cell_center(c)).collect();
    Some(PathPlan {
        cells,
        waypoints,
        cost: g[goal_idx],
    })
}

/// Single-source shortest path costs from the robot's cell to every cell,
/// under the same move rules as [`plan_path`].
#[derive(Clone, Debug)]
pub struct CostField {
    width: usize,
    height: usize,
    origin: Point,
    resolution: f64,
    cost: Vec<f64>,
}

impl CostField {
    pub fn new(known: &OccupancyGrid, from: Point, clearance: usize) -> Self {
        let mask = TraversabilityMask::new(known, clearance);
        Self::with_mask(known, &mask, from)
    }

    pub(crate) fn with_mask(known: &OccupancyGrid, mask: &TraversabilityMask, from: Point) -> Self {
        let n = known.width() * known.height();
        let mut cost = vec![f64::INFINITY; n];
        if let Some(start) = known.index(known.cell_of(from)) {
            let mut open = BinaryHeap::new();
            cost[start] = 0.0;
            open.push(QueueEntry {
                priority: 0.0,
                index: start,
            });
            while let Some(QueueEntry { priority, index }) = open.pop() {
                if priority > cost[index] {
                    continue;
                }
                let cell = known.cell_at_index(index);
                for &(dx, dy) in &NEIGHBORS_8 {
                    if let Some((next, step)) = step_cost(known, mask, cell, dx, dy) {
                        let ni = known.index(next).expect("traversable cells are in bounds");
                        let candidate = priority + step;
                        if candidate < cost[ni] {
                            cost[ni] = candidate;
                            open.push(QueueEntry {
                                priority: candidate,
                                index: ni,
                            });
                        }
                    }
                }
            }
        }
        Self {
            width: known.width(),
            height: known.height(),
            origin: known.origin(),
            resolution: known.resolution(),
            cost,
        }
    }

    /// Path cost to the cell containing `p`, or `None` when unreachable.
    pub fn cost_to(&self, p: Point) -> Option<f64> {
        let x = ((p.x - self.origin.x) / self.resolution).floor();
        let y = ((p.y - self.origin.y) / self.resolution).floor();
        if x < 0.0 || y < 0.0 || x >= self.width as f64 || y >= self.height as f64 {
            return None;
        }
        let c = self.cost[y as usize * self.width + x as usize];
        c.is_finite().then_some(c)
    }

    pub fn is_reachable(&self, p: Point) -> bool {
        self.cost_to(p).is_some()
    }
}
