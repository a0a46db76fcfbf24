//! Supercover ray traversal, the simulated planar LiDAR and scan integration.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{Cell, CellState, GridError, OccupancyGrid, Point, Pose};

/// Relative tolerance under which a ray is considered to pass through a cell corner.
const CORNER_EPS: f64 = 1e-12;

/// A cell visited by a ray, with the ray parameter (meters) at which the ray enters it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraversedCell {
    pub cell: Cell,
    pub t_enter: f64,
}

/// Grid traversal that yields every cell a ray touches, in order of entry.
///
/// When the ray passes exactly through a cell corner, both side cells are
/// yielded before the diagonal one so that a pair of diagonal wall cells
/// cannot be slipped between.
struct RayWalk {
    cell: Cell,
    step: (i32, i32),
    t_max: (f64, f64),
    t_delta: (f64, f64),
    max_t: f64,
    width: i32,
    height: i32,
    pending: [Option<TraversedCell>; 2],
    started: bool,
    done: bool,
}

impl RayWalk {
    fn new(grid: &OccupancyGrid, from: Point, theta: f64, max_t: f64) -> Self {
        let (dy, dx) = theta.sin_cos();
        let res = grid.resolution();
        let o = grid.origin();
        let cell = grid.cell_of(from);
        let axis = |d: f64, p: f64, origin: f64, c: i32| -> (i32, f64, f64) {
            if d > 0.0 {
                let boundary = origin + (c + 1) as f64 * res;
                (1, (boundary - p) / d, res / d)
            } else if d < 0.0 {
                let boundary = origin + c as f64 * res;
                (-1, (boundary - p) / d, -res / d)
            } else {
                (0, f64::INFINITY, f64::INFINITY)
            }
        };
        let (sx, tmx, tdx) = axis(dx, from.x, o.x, cell.x);
        let (sy, tmy, tdy) = axis(dy, from.y, o.y, cell.y);
        Self {
            cell,
            step: (sx, sy),
            t_max: (tmx, tmy),
            t_delta: (tdx, tdy),
            max_t,
            width: grid.width() as i32,
            height: grid.height() as i32,
            pending: [None, None],
            started: false,
            done: false,
        }
    }

    fn inside(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }
}

impl Iterator for RayWalk {
    type Item = TraversedCell;

    fn next(&mut self) -> Option<TraversedCell> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.inside(self.cell) {
                self.done = true;
                return None;
            }
            return Some(TraversedCell {
                cell: self.cell,
                t_enter: 0.0,
            });
        }
        for slot in 0..self.pending.len() {
            if let Some(p) = self.pending[slot].take() {
                return Some(p);
            }
        }
        let (tmx, tmy) = self.t_max;
        let t = tmx.min(tmy);
        if !(t <= self.max_t) {
            self.done = true;
            return None;
        }
        let (sx, sy) = self.step;
        if (tmx - tmy).abs() <= CORNER_EPS * t.max(1.0) {
            let side_x = self.cell.offset(sx, 0);
            let side_y = self.cell.offset(0, sy);
            let diag = self.cell.offset(sx, sy);
            self.cell = diag;
            self.t_max = (tmx + self.t_delta.0, tmy + self.t_delta.1);
            let mut queue = [side_x, side_y, diag]
                .into_iter()
                .filter(|&c| self.inside(c))
                .map(|cell| TraversedCell { cell, t_enter: t });
            let first = queue.next();
            self.pending = [queue.next(), queue.next()];
            if !self.inside(diag) {
                // Remaining side cells are still reported; the walk ends after them.
                self.max_t = f64::NEG_INFINITY;
            }
            if first.is_none() {
                self.done = true;
            }
            return first;
        }
        if tmx < tmy {
            self.cell.x += sx;
            self.t_max.0 += self.t_delta.0;
        } else {
            self.cell.y += sy;
            self.t_max.1 += self.t_delta.1;
        }
        if !self.inside(self.cell) {
            self.done = true;
            return None;
        }
        Some(TraversedCell {
            cell: self.cell,
            t_enter: t,
        })
    }
}

/// Cells touched by the segment `from -> to`, in order of entry, clipped to the grid.
pub fn supercover_cells(grid: &OccupancyGrid, from: Point, to: Point) -> Vec<TraversedCell> {
    let len = from.distance(to);
    let theta = (to.y - from.y).atan2(to.x - from.x);
    RayWalk::new(grid, from, theta, len).collect()
}

/// One LiDAR return in the world frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReturn {
    /// Bearing in `[0, 2pi)`.
    pub theta: f64,
    /// Range in `(0, max_range]`.
    pub range: f64,
}

/// Angle-sorted planar scan. Beams that hit nothing within `max_range` are
/// absent, leaving angular gaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarScan {
    pub returns: Vec<ScanReturn>,
    pub max_range: f64,
    /// Number of beams fired; beam `k` has bearing `(k + 0.5) * 2pi / beams`.
    pub beams: usize,
}

impl PolarScan {
    /// Builds a scan from arbitrary returns, sorting them by bearing.
    pub fn from_returns(mut returns: Vec<ScanReturn>, max_range: f64, beams: usize) -> Self {
        for r in &mut returns {
            r.theta = r.theta.rem_euclid(TAU);
        }
        returns.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        Self {
            returns,
            max_range,
            beams,
        }
    }

    pub fn beam_bearing(&self, k: usize) -> f64 {
        beam_bearing(k, self.beams)
    }

    pub fn angular_spacing(&self) -> f64 {
        TAU / self.beams.max(1) as f64
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

fn beam_bearing(k: usize, beams: usize) -> f64 {
    (k as f64 + 0.5) * TAU / beams as f64
}

/// Casts `beams` uniformly spaced rays from `pose` against the ground truth.
pub fn simulate_scan(
    truth: &OccupancyGrid,
    pose: &Pose,
    beams: usize,
    max_range: f64,
) -> Result<PolarScan, GridError> {
    let origin = pose.position();
    if truth.state_at(origin) != Some(CellState::Free) {
        return Err(GridError::InvalidPose {
            x: pose.x,
            y: pose.y,
        });
    }
    let mut returns = Vec::with_capacity(beams);
    for k in 0..beams {
        let theta = beam_bearing(k, beams);
        let hit = RayWalk::new(truth, origin, theta, max_range)
            .find(|tc| truth.get(tc.cell) == Some(CellState::Occupied));
        if let Some(tc) = hit {
            returns.push(ScanReturn {
                theta,
                range: tc.t_enter.max(f64::EPSILON),
            });
        }
    }
    Ok(PolarScan {
        returns,
        max_range,
        beams,
    })
}

/// Folds a scan taken at `pose` into the known grid.
///
/// Cells entered before a beam's endpoint become Free, the endpoint cell
/// becomes Occupied unless the beam ends on a cell corner, and beams without a return clear cells out to
/// `max_range`. Occupied cells are never downgraded.
pub fn integrate_scan(known: &mut OccupancyGrid, scan: &PolarScan, pose: &Pose) {
    let origin = pose.position();
    let half = scan.angular_spacing() / 2.0;
    let mut next_return = scan.returns.iter().peekable();
    for k in 0..scan.beams {
        let theta = scan.beam_bearing(k);
        while next_return.next_if(|r| r.theta < theta - half).is_some() {}
        let range = next_return
            .next_if(|r| (r.theta - theta).abs() <= half)
            .map(|r| r.range);
        let limit = range.unwrap_or(scan.max_range);
        let mut at_end = Vec::with_capacity(3);
        for tc in RayWalk::new(known, origin, theta, limit) {
            if range.is_some_and(|r| tc.t_enter >= r) {
                at_end.push(tc.cell);
                continue;
            }
            if known.get(tc.cell) != Some(CellState::Occupied) {
                known.set(tc.cell, CellState::Free);
            }
        }
        // A beam through a cell corner enters several cells at its endpoint
        // and cannot tell which one returned; those are left untouched.
        if let [cell] = at_end[..] {
            known.set(cell, CellState::Occupied);
        }
    }
}
