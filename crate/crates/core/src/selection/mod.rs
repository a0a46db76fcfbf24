//! Scoring of frontier points inside the assigned subregion.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontier::{FrontierId, FrontierPoint};
use crate::gridworld::{normalize_angle, Cell, CellState, OccupancyGrid, Point, Pose};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GainWeightsError {
    #[error("weights.{0} must be a finite non-negative number")]
    Negative(&'static str),
    #[error("weights.kernel_k must be odd and at least 3 (got {0})")]
    Kernel(usize),
    #[error("state scores must satisfy 0 <= s_occupied <= s_free <= s_unknown")]
    ScoreOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainWeights {
    /// Penalty weight on the normalized traveling gain.
    pub tau1: f64,
    /// Penalty weight on the normalized orientation gain.
    pub tau2: f64,
    /// Reward weight on the normalized information gain.
    pub tau3: f64,
    /// Side of the information kernel in cells.
    pub kernel_k: usize,
    pub s_occupied: f64,
    pub s_free: f64,
    pub s_unknown: f64,
}

impl Default for GainWeights {
    fn default() -> Self {
        Self {
            tau1: 1.0,
            tau2: 0.6,
            tau3: 1.2,
            kernel_k: 9,
            s_occupied: 0.0,
            s_free: 0.2,
            s_unknown: 1.0,
        }
    }
}

impl GainWeights {
    pub fn validate(&self) -> Result<(), GainWeightsError> {
        for (name, v) in [
            ("tau1", self.tau1),
            ("tau2", self.tau2),
            ("tau3", self.tau3),
            ("s_occupied", self.s_occupied),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(GainWeightsError::Negative(name));
            }
        }
        if self.kernel_k < 3 || self.kernel_k % 2 == 0 {
            return Err(GainWeightsError::Kernel(self.kernel_k));
        }
        if !(self.s_occupied <= self.s_free && self.s_free <= self.s_unknown && self.s_unknown.is_finite()) {
            return Err(GainWeightsError::ScoreOrder);
        }
        Ok(())
    }

    fn score(&self, state: CellState) -> f64 {
        match state {
            CellState::Occupied => self.s_occupied,
            CellState::Free => self.s_free,
            CellState::Unknown => self.s_unknown,
        }
    }
}

/// Raw and combined gains of one candidate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainBreakdown {
    pub id: FrontierId,
    pub g_distance: f64,
    pub g_orientation: f64,
    pub g_information: f64,
    pub total: f64,
}

pub fn traveling_gain(robot: Point, frontier: Point) -> f64 {
    robot.distance(frontier)
}

/// Absolute angle in `[0, pi]` between the heading and the bearing to `frontier`.
pub fn orientation_deviation(robot: &Pose, frontier: Point) -> f64 {
    let dx = frontier.x - robot.x;
    let dy = frontier.y - robot.y;
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    normalize_angle(dy.atan2(dx) - robot.heading).abs().min(PI)
}

/// `exp(2 (2 theta / pi - 1))` for a deviation `theta` in `[0, pi]`.
pub fn orientation_gain_from_angle(theta: f64) -> f64 {
    (2.0 * (2.0 * theta / PI - 1.0)).exp()
}

pub fn orientation_gain(robot: &Pose, frontier: Point) -> f64 {
    orientation_gain_from_angle(orientation_deviation(robot, frontier))
}

/// `exp(mean state score)` over the `k x k` window centered on the frontier's cell.
pub fn information_gain(known: &OccupancyGrid, frontier: Point, weights: &GainWeights) -> f64 {
    let k = weights.kernel_k as i32;
    let half = k / 2;
    let c = known.cell_of(frontier);
    let mut sum = 0.0;
    for dy in -half..=half {
        for dx in -half..=half {
            sum += weights.score(known.state_or_unknown(Cell::new(c.x + dx, c.y + dy)));
        }
    }
    (sum / (k * k) as f64).exp()
}

fn min_max(raw: &[GainBreakdown], field: fn(&GainBreakdown) -> f64) -> impl Fn(f64) -> f64 {
    let lo = raw.iter().map(field).fold(f64::INFINITY, f64::min);
    let hi = raw.iter().map(field).fold(f64::NEG_INFINITY, f64::max);
    move |v| {
        if hi > lo {
            (v - lo) / (hi - lo)
        } else {
            0.5
        }
    }
}

/// Normalizes each raw indicator across `raw` and fills in `total`.
/// Returns the index of the winner: highest total, then smallest traveling
/// gain, then smallest id. `None` when `raw` is empty.
pub fn score_candidates(raw: &mut [GainBreakdown], weights: &GainWeights) -> Option<usize> {
    let nd = min_max(raw, |g| g.g_distance);
    let no = min_max(raw, |g| g.g_orientation);
    let ni = min_max(raw, |g| g.g_information);
    for g in raw.iter_mut() {
        g.total = weights.tau3 * ni(g.g_information) - weights.tau1 * nd(g.g_distance) - weights.tau2 * no(g.g_orientation);
    }
    (0..raw.len()).reduce(|best, i| {
        let (a, b) = (&raw[i], &raw[best]);
        let better = a.total > b.total
            || (a.total == b.total
                && (a.g_distance < b.g_distance || (a.g_distance == b.g_distance && a.id < b.id)));
        if better {
            i
        } else {
            best
        }
    })
}

/// Selection result: the chosen frontier and the scores of every candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub target: FrontierId,
    pub position: Point,
    pub gains: Vec<GainBreakdown>,
}

/// Scores every candidate and picks the target; `None` when there are no candidates.
pub fn select_target(
    candidates: &[&FrontierPoint],
    robot: &Pose,
    known: &OccupancyGrid,
    weights: &GainWeights,
) -> Option<Selection> {
    let mut gains: Vec<GainBreakdown> = candidates
        .iter()
        .map(|f| GainBreakdown {
            id: f.id,
            g_distance: traveling_gain(robot.position(), f.position),
            g_orientation: orientation_gain(robot, f.position),
            g_information: information_gain(known, f.position, weights),
            total: 0.0,
        })
        .collect();
    let best = score_candidates(&mut gains, weights)?;
    Some(Selection {
        target: gains[best].id,
        position: candidates[best].position,
        gains,
    })
}
