use super::{FrontierCandidate, FrontierId, FrontierSet, SamplerConfig};
use crate::gridworld::{plan_path, supercover_cells, CellState, CostField, OccupancyGrid, Point, Pose};

/// Answers whether the robot can currently plan a path to a point.
pub trait Reachability {
    fn is_reachable(&self, target: Point) -> bool;
}

impl Reachability for CostField {
    fn is_reachable(&self, target: Point) -> bool {
        CostField::is_reachable(self, target)
    }
}

/// Reachability by running [`plan_path`] per query.
pub struct PlannerReachability<'a> {
    pub known: &'a OccupancyGrid,
    pub pose: Pose,
    pub clearance: usize,
}

impl Reachability for PlannerReachability<'_> {
    fn is_reachable(&self, target: Point) -> bool {
        plan_path(self.known, &self.pose, target, self.clearance).is_some()
    }
}

fn line_of_sight(known: &OccupancyGrid, a: Point, b: Point) -> bool {
    supercover_cells(known, a, b)
        .iter()
        .all(|t| known.get(t.cell) != Some(CellState::Occupied))
}

/// Free cell whose surroundings hold no observable Unknown boundary.
fn mapped_through(known: &OccupancyGrid, p: Point, radius: f64) -> bool {
    known.state_at(p) == Some(CellState::Free) && !known.has_open_unknown_within(p, radius)
}

/// Admits candidates into `active`, snapped to their cell centers, and
/// returns the ids of the admitted ones.
///
/// A candidate is rejected when it lies outside the map or in an Occupied
/// cell, when an Occupied cell lies within `clearance_radius`, when an active
/// frontier within `dedup_radius` is in line of sight, when its cell is Free
/// with no observable Unknown within `dedup_radius`, or when it lies within
/// half a `dedup_radius` of a spot the robot already reached as a target.
/// Candidates are processed in order, so earlier survivors suppress later
/// duplicates.
pub fn filter_frontiers(
    candidates: &[FrontierCandidate],
    known: &OccupancyGrid,
    active: &mut FrontierSet,
    config: &SamplerConfig,
    step: u64,
) -> Vec<FrontierId> {
    let mut admitted = Vec::new();
    for cand in candidates {
        let cell = known.cell_of(cand.position);
        let Some(state) = known.get(cell) else {
            continue;
        };
        if state == CellState::Occupied {
            continue;
        }
        let position = known.cell_center(cell);
        let near_obstacle = known
            .cells_in_disk(position, config.clearance_radius)
            .any(|c| known.get(c) == Some(CellState::Occupied));
        if near_obstacle {
            continue;
        }
        let duplicate = active.iter().any(|f| {
            f.position.distance(position) <= config.dedup_radius && line_of_sight(known, position, f.position)
        });
        if duplicate {
            continue;
        }
        if mapped_through(known, position, config.dedup_radius) {
            continue;
        }
        let revisit = active
            .visited()
            .iter()
            .any(|v| v.distance(position) <= 0.5 * config.dedup_radius);
        if revisit {
            continue;
        }
        admitted.push(active.insert(position, cand.source, step));
    }
    admitted
}

/// Drops active frontiers that were mapped through or are unreachable;
/// returns the removed ids.
pub fn prune_frontiers(
    active: &mut FrontierSet,
    known: &OccupancyGrid,
    reach: &impl Reachability,
    config: &SamplerConfig,
) -> Vec<FrontierId> {
    active.retain(|f| !mapped_through(known, f.position, config.dedup_radius) && reach.is_reachable(f.position))
}
