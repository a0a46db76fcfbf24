use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::RunResult;
use crate::gridworld::{CellState, OccupancyGrid, Point, Pose, NEIGHBORS_4};

/// Free cells 4-connected to the cell containing `start` on the ground truth.
pub fn reachable_free(truth: &OccupancyGrid, start: Point) -> Vec<bool> {
    let mut seen = vec![false; truth.width() * truth.height()];
    let c = truth.cell_of(start);
    if truth.get(c) != Some(CellState::Free) {
        return seen;
    }
    let mut queue = VecDeque::from([c]);
    seen[truth.index(c).expect("start is on the map")] = true;
    while let Some(c) = queue.pop_front() {
        for &(dx, dy) in &NEIGHBORS_4 {
            let n = c.offset(dx, dy);
            if let Some(i) = truth.index(n) {
                if !seen[i] && truth.get(n) == Some(CellState::Free) {
                    seen[i] = true;
                    queue.push_back(n);
                }
            }
        }
    }
    seen
}

/// Known (Free or Occupied) area in square meters.
pub fn explored_area(known: &OccupancyGrid) -> f64 {
    let r = known.resolution();
    known.known_count() as f64 * r * r
}

/// Headline numbers of one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub distance_m: f64,
    pub time_s: f64,
    pub area_m2: f64,
    /// Explored area per meter traveled.
    pub rate_m2_per_m: f64,
    /// Fraction of reachable Free cells known as Free at the end.
    pub completion: f64,
}

impl MetricsRow {
    /// `distance` is floored at one cell so a run that never moved reports
    /// its area rather than dividing by zero.
    pub fn new(distance_m: f64, speed: f64, area_m2: f64, resolution: f64, completion: f64) -> Self {
        Self {
            distance_m,
            time_s: distance_m / speed,
            area_m2,
            rate_m2_per_m: area_m2 / distance_m.max(resolution),
            completion,
        }
    }
}

pub fn metrics(result: &RunResult) -> MetricsRow {
    MetricsRow::new(
        result.traveled(),
        result.speed,
        explored_area(&result.known),
        result.known.resolution(),
        result.completion(),
    )
}

/// Radius around the nominal start within which seeds scatter the start cell.
const JITTER_RADIUS: f64 = 1.0;

/// Start pose for a seed: a random truth-Free cell center near `nominal`
/// whose Chebyshev `clearance` neighbourhood is free of walls, with a random
/// heading. Falls back to the nominal position when no such cell exists.
pub fn jittered_start(truth: &OccupancyGrid, nominal: Pose, seed: u64, clearance: usize) -> Pose {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let heading = rng.gen_range(-PI..PI);
    let cells: Vec<_> = truth
        .cells_in_disk(nominal.position(), JITTER_RADIUS)
        .filter(|&c| {
            truth.get(c) == Some(CellState::Free) && !truth.any_in_square(c, clearance as i32, CellState::Occupied)
        })
        .collect();
    if cells.is_empty() {
        return Pose::new(nominal.x, nominal.y, heading);
    }
    let p = truth.cell_center(cells[rng.gen_range(0..cells.len())]);
    Pose::new(p.x, p.y, heading)
}
