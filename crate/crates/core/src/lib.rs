//! Autonomous exploration of 2D occupancy grids: hybrid frontier sampling,
//! hierarchical subregion sequencing and heuristic target selection, plus a
//! simulated robot and a benchmark harness.

pub mod frontier;
pub mod gridworld;
pub mod hierarchy;
pub mod selection;
pub mod explorer;
pub mod harness;

pub use explorer::{run, run_nearest_baseline, Planner, RunConfig, RunResult, RunStatus};
pub use frontier::{FrontierId, FrontierPoint, FrontierSet, SamplerConfig};
pub use gridworld::{CellState, OccupancyGrid, Point, PolarScan, Pose};
pub use hierarchy::{Rect, SubregionGrid};
pub use selection::GainWeights;
