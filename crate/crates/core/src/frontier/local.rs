//! Boundary-cluster frontier detection restricted to a disk around the robot.

use std::collections::{HashMap, VecDeque};

use super::{FrontierCandidate, FrontierSource};
use crate::gridworld::{Cell, OccupancyGrid, Pose, NEIGHBORS_8};

/// Clusters smaller than this are treated as noise.
pub const MIN_CLUSTER_CELLS: usize = 3;

/// Finds Free cells 8-adjacent to Unknown within `d_s` of the robot, groups
/// them into 8-connected clusters and emits one candidate per cluster of at
/// least [`MIN_CLUSTER_CELLS`] cells, at the member nearest the centroid.
///
/// Work is bounded by the disk area, independent of map size. Clusters are
/// reported in row-major order of their first cell.
pub fn detect_local_frontiers(known: &OccupancyGrid, pose: &Pose, d_s: f64) -> Vec<FrontierCandidate> {
    let boundary: Vec<Cell> = known
        .cells_in_disk(pose.position(), d_s)
        .filter(|&c| known.is_frontier_cell(c))
        .collect();
    let mut label: HashMap<Cell, usize> = boundary.iter().map(|&c| (c, usize::MAX)).collect();

    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for (seed_no, &seed) in boundary.iter().enumerate() {
        if label[&seed] != usize::MAX {
            continue;
        }
        label.insert(seed, seed_no);
        queue.push_back(seed);
        let mut members = Vec::new();
        while let Some(c) = queue.pop_front() {
            members.push(c);
            for &(dx, dy) in &NEIGHBORS_8 {
                let n = c.offset(dx, dy);
                if let Some(l) = label.get_mut(&n) {
                    if *l == usize::MAX {
                        *l = seed_no;
                        queue.push_back(n);
                    }
                }
            }
        }
        if members.len() < MIN_CLUSTER_CELLS {
            continue;
        }
        let rep = nearest_to_centroid(&members);
        out.push(FrontierCandidate {
            position: known.cell_center(rep),
            source: FrontierSource::LocalMap,
        });
    }
    out
}

/// Member closest to the cluster centroid, compared exactly in integer cell
/// units; ties go to the row-major smallest cell.
pub(crate) fn nearest_to_centroid(members: &[Cell]) -> Cell {
    let n = members.len() as i64;
    let sx: i64 = members.iter().map(|c| c.x as i64).sum();
    let sy: i64 = members.iter().map(|c| c.y as i64).sum();
    *members
        .iter()
        .min_by_key(|c| {
            let dx = n * c.x as i64 - sx;
            let dy = n * c.y as i64 - sy;
            (dx * dx + dy * dy, c.y, c.x)
        })
        .expect("cluster is non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::{CellState, Point};

    fn grid(w: usize, h: usize, fill: CellState) -> OccupancyGrid {
        OccupancyGrid::new(w, h, 0.1, Point::default(), fill).unwrap()
    }

    #[test]
    fn fully_free_disk_has_no_frontiers() {
        let g = grid(100, 100, CellState::Free);
        let out = detect_local_frontiers(&g, &Pose::new(5.0, 5.0, 0.0), 3.0);
        assert!(out.is_empty());
    }

    #[test]
    fn half_plane_boundary_is_one_cluster_on_the_line() {
        let mut g = grid(100, 100, CellState::Free);
        for (c, _) in g.clone().iter_cells() {
            if c.x >= 50 {
                g.set(c, CellState::Unknown);
            }
        }
        let out = detect_local_frontiers(&g, &Pose::new(4.55, 5.05, 0.0), 2.0);
        assert_eq!(out.len(), 1);
        let p = out[0].position;
        assert_eq!(g.cell_of(p).x, 49);
        assert!((p.y - 5.05).abs() < 0.11);
    }

    #[test]
    fn walled_pockets_give_two_clusters() {
        // Unknown above y = 35, split into two pockets by a wall at x = 30
        // that reaches down into the mapped area.
        let mut g = grid(60, 60, CellState::Free);
        for (c, _) in g.clone().iter_cells() {
            if c.y >= 35 {
                g.set(c, CellState::Unknown);
            }
            if c.x == 30 && c.y >= 30 {
                g.set(c, CellState::Occupied);
            }
        }
        let out = detect_local_frontiers(&g, &Pose::new(3.05, 3.05, 0.0), 10.0);
        assert_eq!(out.len(), 2);
        assert!(out[0].position.x < 3.0 && out[1].position.x > 3.1);
        // A small disk that only reaches the left pocket.
        let out = detect_local_frontiers(&g, &Pose::new(1.05, 3.05, 0.0), 1.0);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn tiny_clusters_are_dropped() {
        // Room x >= 20, y <= 20 walled by Occupied space; the corner wall
        // cell (19, 21) was never hit and stays Unknown.
        let mut g = grid(40, 40, CellState::Occupied);
        for y in 0..=20 {
            for x in 20..40 {
                g.set(Cell::new(x, y), CellState::Free);
            }
        }
        g.set(Cell::new(19, 21), CellState::Unknown);
        assert!(g.is_frontier_cell(Cell::new(20, 20)));
        let out = detect_local_frontiers(&g, &Pose::new(3.05, 1.05, 0.0), 5.0);
        assert!(out.is_empty());
    }

    #[test]
    fn centroid_tie_breaks_row_major() {
        let members = [Cell::new(0, 0), Cell::new(1, 0), Cell::new(2, 0), Cell::new(3, 0)];
        assert_eq!(nearest_to_centroid(&members), Cell::new(1, 0));
    }
}
