//! Subregion segmentation of the known map and ordering of subregion visits.
//!
//! The bounding box of every non-Unknown cell is split into an `n_w x n_h`
//! grid of equal rectangles. Subregions holding at least one active frontier
//! are ordered by maximizing a revenue that decays with the cumulative path
//! length through subregion centers and with the DTW distance to the order
//! adopted in the previous cycle.

mod dtw;
mod sequence;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontier::{FrontierId, FrontierPoint};
use crate::gridworld::{OccupancyGrid, Point};

pub use dtw::dtw_distance;
pub use sequence::{
    current_subregion, optimize_order, optimize_sequence, remap_previous, sequence_revenue, SequencePlan,
    SequenceWeights, SolverMode, EXHAUSTIVE_MAX,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HierarchyError {
    #[error("map has no known cells, bounds are undefined")]
    NoBounds,
    #[error("subregion split counts must be at least 1 (got {n_w}x{n_h})")]
    InvalidSplit { n_w: usize, n_h: usize },
    #[error("no subregion holds a frontier")]
    NothingToSequence,
}

/// Axis-aligned rectangle in world meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point {
        Point::new((self.min.x + self.max.x) / 2.0, (self.min.y + self.max.y) / 2.0)
    }

    /// Closed containment.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }
}

/// Minimal rectangle covering every Free and Occupied cell.
pub fn compute_bounds(known: &OccupancyGrid) -> Result<Rect, HierarchyError> {
    let mut lo = (i32::MAX, i32::MAX);
    let mut hi = (i32::MIN, i32::MIN);
    for (c, s) in known.iter_cells() {
        if s.is_known() {
            lo = (lo.0.min(c.x), lo.1.min(c.y));
            hi = (hi.0.max(c.x), hi.1.max(c.y));
        }
    }
    if lo.0 > hi.0 {
        return Err(HierarchyError::NoBounds);
    }
    let res = known.resolution();
    let o = known.origin();
    Ok(Rect::new(
        Point::new(o.x + lo.0 as f64 * res, o.y + lo.1 as f64 * res),
        Point::new(o.x + (hi.0 + 1) as f64 * res, o.y + (hi.1 + 1) as f64 * res),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subregion {
    /// Row-major index `iy * n_w + ix`.
    pub index: usize,
    pub rect: Rect,
    pub center: Point,
    pub frontiers: Vec<FrontierId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubregionGrid {
    pub bounds: Rect,
    pub n_w: usize,
    pub n_h: usize,
    pub subregions: Vec<Subregion>,
}

/// `k`-th of `n + 1` split coordinates between `lo` and `hi`; the last one is exactly `hi`.
fn split_edge(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    if k == n {
        hi
    } else {
        lo + (hi - lo) * k as f64 / n as f64
    }
}

/// Column (or row) of `v`: the largest `k` whose edge is `<= v`, clamped to the grid.
/// Points on a shared edge therefore belong to the higher-index side.
fn split_slot(lo: f64, hi: f64, n: usize, v: f64) -> usize {
    (1..n).take_while(|&k| split_edge(lo, hi, k, n) <= v).count()
}

impl SubregionGrid {
    pub fn index_of(&self, p: Point) -> usize {
        let b = &self.bounds;
        let ix = split_slot(b.min.x, b.max.x, self.n_w, p.x);
        let iy = split_slot(b.min.y, b.max.y, self.n_h, p.y);
        iy * self.n_w + ix
    }

    /// Subregions holding at least one frontier.
    pub fn filtered(&self) -> impl Iterator<Item = &Subregion> + '_ {
        self.subregions.iter().filter(|s| !s.frontiers.is_empty())
    }

    pub fn get(&self, index: usize) -> Option<&Subregion> {
        self.subregions.get(index)
    }
}

/// Splits `bounds` into `n_w x n_h` equal rectangles and assigns each
/// frontier to the subregion containing it. Frontiers outside `bounds` go
/// to the nearest border subregion.
pub fn segment(
    bounds: Rect,
    n_w: usize,
    n_h: usize,
    frontiers: &[FrontierPoint],
) -> Result<SubregionGrid, HierarchyError> {
    if n_w == 0 || n_h == 0 {
        return Err(HierarchyError::InvalidSplit { n_w, n_h });
    }
    let mut subregions = Vec::with_capacity(n_w * n_h);
    for iy in 0..n_h {
        for ix in 0..n_w {
            let rect = Rect::new(
                Point::new(
                    split_edge(bounds.min.x, bounds.max.x, ix, n_w),
                    split_edge(bounds.min.y, bounds.max.y, iy, n_h),
                ),
                Point::new(
                    split_edge(bounds.min.x, bounds.max.x, ix + 1, n_w),
                    split_edge(bounds.min.y, bounds.max.y, iy + 1, n_h),
                ),
            );
            subregions.push(Subregion {
                index: iy * n_w + ix,
                rect,
                center: rect.center(),
                frontiers: Vec::new(),
            });
        }
    }
    let mut grid = SubregionGrid {
        bounds,
        n_w,
        n_h,
        subregions,
    };
    for f in frontiers {
        let i = grid.index_of(f.position);
        grid.subregions[i].frontiers.push(f.id);
    }
    Ok(grid)
}
