//! The exploration loop: sense, sample, filter, segment, sequence, select, move.
//!
//! Time is discrete: one step moves the robot one cell along its planned
//! path, after which it scans again. Simulated time is distance over speed.

mod metrics;
mod record;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontier::{
    detect_local_frontiers, detect_scan_frontiers, filter_frontiers, prune_frontiers, FrontierId, FrontierPoint,
    FrontierSet, Reachability, SamplerConfig, SamplerConfigError,
};
use crate::gridworld::{
    integrate_scan, simulate_scan, Cell, CellState, CostField, GridError, OccupancyGrid, Point, Pose,
    TraversabilityMask,
};
use crate::hierarchy::{
    compute_bounds, optimize_sequence, segment, HierarchyError, SequencePlan, SequenceWeights, SolverMode,
    SubregionGrid,
};
use crate::selection::{select_target, GainWeights, GainWeightsError};

pub use metrics::{explored_area, jittered_start, metrics, reachable_free, MetricsRow};
pub use record::{RecordError, RunRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Planner {
    /// Subregion sequencing followed by gain-based target selection.
    Hphs,
    /// Always drive to the frontier with the cheapest planned path.
    Nearest,
}

impl Planner {
    pub fn name(self) -> &'static str {
        match self {
            Planner::Hphs => "hphs",
            Planner::Nearest => "nearest",
        }
    }
}

impl std::str::FromStr for Planner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hphs" => Ok(Planner::Hphs),
            "nearest" => Ok(Planner::Nearest),
            other => Err(format!("unknown planner '{other}' (expected hphs or nearest)")),
        }
    }
}

impl std::fmt::Display for Planner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    /// No active frontier remained.
    Complete,
    /// `max_steps` ran out first.
    Budget,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Complete => "complete",
            RunStatus::Budget => "budget",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExplorerError {
    #[error("start pose ({x:.3}, {y:.3}) is not in a free cell of the map")]
    InvalidStart { x: f64, y: f64 },
    #[error("run.speed must be positive")]
    Speed,
    #[error("run.max_steps must be positive")]
    MaxSteps,
    #[error("scan.beams must be positive and scan.max_range positive")]
    Scan,
    #[error(transparent)]
    Sampler(#[from] SamplerConfigError),
    #[error(transparent)]
    Gains(#[from] GainWeightsError),
    #[error("sequence weights must be non-negative")]
    Sequence,
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub beams: usize,
    pub max_range: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            beams: 360,
            max_range: 10.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Meters per second, used only to derive simulated time.
    pub speed: f64,
    /// Steps between periodic replans.
    pub replan_interval: u64,
    pub max_steps: u64,
    /// Seed for start-pose jitter.
    pub rng_seed: u64,
    /// Map resolution used when loading map files (m/cell).
    pub resolution: f64,
    pub scan: ScanConfig,
    /// Planner obstacle margin in cells.
    pub clearance: usize,
    pub sampler: SamplerConfig,
    pub n_w: usize,
    pub n_h: usize,
    pub sequence: SequenceWeights,
    pub solver: SolverMode,
    pub gains: GainWeights,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            speed: 0.6,
            replan_interval: 25,
            max_steps: 40_000,
            rng_seed: 0,
            resolution: 0.1,
            scan: ScanConfig::default(),
            clearance: 2,
            sampler: SamplerConfig::default(),
            n_w: 2,
            n_h: 2,
            sequence: SequenceWeights::default(),
            solver: SolverMode::Auto,
            gains: GainWeights::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ExplorerError> {
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(ExplorerError::Speed);
        }
        if self.max_steps == 0 {
            return Err(ExplorerError::MaxSteps);
        }
        if self.scan.beams == 0 || !(self.scan.max_range > 0.0 && self.scan.max_range.is_finite()) {
            return Err(ExplorerError::Scan);
        }
        self.sampler.validate(self.scan.beams)?;
        self.gains.validate()?;
        if !self.sequence.is_valid() {
            return Err(ExplorerError::Sequence);
        }
        if self.n_w == 0 || self.n_h == 0 {
            return Err(HierarchyError::InvalidSplit {
                n_w: self.n_w,
                n_h: self.n_h,
            }
            .into());
        }
        Ok(())
    }

    /// Distance at which a target counts as reached.
    pub fn reach_radius(&self) -> f64 {
        0.5 * self.sampler.dedup_radius
    }
}

/// One row of the per-step log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub sim_time: f64,
    pub pose: Pose,
    pub traveled: f64,
    pub explored_m2: f64,
    pub completion: f64,
    pub frontiers: usize,
    pub subregions: usize,
    pub target: Option<Point>,
}

/// Everything a finished run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub planner: Planner,
    pub status: RunStatus,
    pub speed: f64,
    /// One record per step, starting with the pose before the first move.
    pub steps: Vec<StepRecord>,
    pub known: OccupancyGrid,
    /// Frontiers still active at the end (empty when complete).
    pub frontiers: Vec<FrontierPoint>,
    /// Segmentation of the last replanning cycle (hierarchical planner only).
    pub subregions: Option<SubregionGrid>,
    pub reachable_cells: usize,
    pub explored_reachable_cells: usize,
}

impl RunResult {
    pub fn trajectory(&self) -> impl Iterator<Item = Pose> + '_ {
        self.steps.iter().map(|s| s.pose)
    }

    pub fn traveled(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.traveled)
    }

    pub fn completion(&self) -> f64 {
        if self.reachable_cells == 0 {
            1.0
        } else {
            self.explored_reachable_cells as f64 / self.reachable_cells as f64
        }
    }
}

/// Live state of a run.
#[derive(Clone, Debug)]
pub struct ExplorationState {
    pub step: u64,
    pub sim_time: f64,
    pub pose: Pose,
    pub known: OccupancyGrid,
    pub active: FrontierSet,
    pub plan: Option<SequencePlan>,
    pub subregions: Option<SubregionGrid>,
    pub target: Option<(FrontierId, Point)>,
    pub trajectory: Vec<Pose>,
    pub traveled: f64,
}

/// Prune pass that only drops mapped-through frontiers.
struct AlwaysReachable;

impl Reachability for AlwaysReachable {
    fn is_reachable(&self, _target: Point) -> bool {
        true
    }
}

struct Explorer<'a> {
    truth: &'a OccupancyGrid,
    config: &'a RunConfig,
    planner: Planner,
    reachable: Vec<bool>,
    reachable_cells: usize,
    state: ExplorationState,
    path: VecDeque<Point>,
    path_clearance: usize,
    steps: Vec<StepRecord>,
}

impl<'a> Explorer<'a> {
    fn new(truth: &'a OccupancyGrid, start: Pose, config: &'a RunConfig, planner: Planner) -> Result<Self, ExplorerError> {
        config.validate()?;
        if truth.state_at(start.position()) != Some(CellState::Free) {
            return Err(ExplorerError::InvalidStart { x: start.x, y: start.y });
        }
        let reachable = reachable_free(truth, start.position());
        let reachable_cells = reachable.iter().filter(|&&r| r).count();
        Ok(Self {
            truth,
            config,
            planner,
            reachable,
            reachable_cells,
            state: ExplorationState {
                step: 0,
                sim_time: 0.0,
                pose: start,
                known: truth.unknown_like(),
                active: FrontierSet::new(),
                plan: None,
                subregions: None,
                target: None,
                trajectory: vec![start],
                traveled: 0.0,
            },
            path: VecDeque::new(),
            path_clearance: config.clearance,
            steps: Vec::new(),
        })
    }

    fn explored_reachable(&self) -> usize {
        self.state
            .known
            .cells()
            .iter()
            .zip(&self.reachable)
            .filter(|(s, r)| **r && **s == CellState::Free)
            .count()
    }

    fn sense(&mut self) -> Result<(), ExplorerError> {
        let st = &mut self.state;
        let scan = simulate_scan(self.truth, &st.pose, self.config.scan.beams, self.config.scan.max_range)?;
        integrate_scan(&mut st.known, &scan, &st.pose);
        let mut candidates = detect_scan_frontiers(&scan, &st.pose, &self.config.sampler);
        candidates.extend(detect_local_frontiers(&st.known, &st.pose, self.config.sampler.d_s));
        prune_frontiers(&mut st.active, &st.known, &AlwaysReachable, &self.config.sampler);
        filter_frontiers(&candidates, &st.known, &mut st.active, &self.config.sampler, st.step);
        Ok(())
    }

    fn record(&mut self) {
        let st = &self.state;
        let res = st.known.resolution();
        let completion = if self.reachable_cells == 0 {
            1.0
        } else {
            self.explored_reachable() as f64 / self.reachable_cells as f64
        };
        self.steps.push(StepRecord {
            step: st.step,
            sim_time: st.sim_time,
            pose: st.pose,
            traveled: st.traveled,
            explored_m2: st.known.known_count() as f64 * res * res,
            completion,
            frontiers: st.active.len(),
            subregions: st.subregions.as_ref().map_or(0, |g| g.filtered().count()),
            target: st.target.map(|t| t.1),
        });
    }

    /// Largest clearance (up to the configured one) that keeps the robot's
    /// own cell traversable, so a robot squeezed by a newly seen wall can
    /// still plan its way out.
    fn effective_clearance(&self) -> usize {
        let cell = self.state.known.cell_of(self.state.pose.position());
        let mut c = self.config.clearance;
        while c > 0 && self.state.known.any_in_square(cell, c as i32, CellState::Occupied) {
            c -= 1;
        }
        c
    }

    fn choose_hphs(&mut self) -> Result<(FrontierId, Point), ExplorerError> {
        let st = &mut self.state;
        let bounds = compute_bounds(&st.known)?;
        let grid = segment(bounds, self.config.n_w, self.config.n_h, st.active.as_slice())?;
        let previous = st.plan.as_ref().map(|p| p.centers.clone()).unwrap_or_default();
        let plan = optimize_sequence(
            &grid,
            st.pose.position(),
            &previous,
            &self.config.sequence,
            self.config.solver,
        )?;
        let mut chosen = None;
        for &s in &plan.order {
            let candidates: Vec<&FrontierPoint> =
                grid.subregions[s].frontiers.iter().filter_map(|&id| st.active.get(id)).collect();
            if let Some(sel) = select_target(&candidates, &st.pose, &st.known, &self.config.gains) {
                chosen = Some((sel.target, sel.position));
                break;
            }
        }
        st.plan = Some(plan);
        st.subregions = Some(grid);
        Ok(chosen.ok_or(HierarchyError::NothingToSequence)?)
    }

    fn choose_nearest(&self, field: &CostField) -> (FrontierId, Point) {
        self.state
            .active
            .iter()
            .filter_map(|f| field.cost_to(f.position).map(|c| (c, f)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.id.cmp(&b.1.id)))
            .map(|(_, f)| (f.id, f.position))
            .expect("pruned set holds only reachable frontiers")
    }

    /// Prunes, picks a target and plans a path to it. Returns false when no
    /// frontier is left.
    fn replan(&mut self) -> Result<bool, ExplorerError> {
        let clearance = self.effective_clearance();
        let mask = TraversabilityMask::new(&self.state.known, clearance);
        let here = self.state.pose.position();
        let field = CostField::with_mask(&self.state.known, &mask, here);
        loop {
            prune_frontiers(&mut self.state.active, &self.state.known, &field, &self.config.sampler);
            if self.state.active.is_empty() {
                self.state.target = None;
                self.path.clear();
                return Ok(false);
            }
            let (id, position) = match self.planner {
                Planner::Hphs => self.choose_hphs()?,
                Planner::Nearest => self.choose_nearest(&field),
            };
            let plan = crate::gridworld::plan_path_with_mask(&self.state.known, &mask, here, position);
            let Some(plan) = plan.filter(|_| here.distance(position) > self.config.reach_radius()) else {
                // Already there, or unexpectedly unplannable: retire it and choose again.
                self.state.active.mark_visited(id);
                continue;
            };
            self.state.target = Some((id, position));
            self.path = plan.waypoints.into_iter().skip(1).collect();
            self.path_clearance = clearance;
            return Ok(true);
        }
    }

    fn blocked(&self, next: Point) -> bool {
        let known = &self.state.known;
        let from = known.cell_of(self.state.pose.position());
        let to = known.cell_of(next);
        if known.any_in_square(to, self.path_clearance as i32, CellState::Occupied) {
            return true;
        }
        let corner = |c: Cell| known.get(c) == Some(CellState::Occupied);
        from.x != to.x && from.y != to.y && (corner(Cell::new(to.x, from.y)) || corner(Cell::new(from.x, to.y)))
    }

    fn advance(&mut self, next: Point) {
        let st = &mut self.state;
        let here = st.pose.position();
        let heading = (next.y - here.y).atan2(next.x - here.x);
        st.traveled += here.distance(next);
        st.sim_time = st.traveled / self.config.speed;
        st.pose = Pose::new(next.x, next.y, heading);
        st.step += 1;
        st.trajectory.push(st.pose);
    }

    fn run(mut self) -> Result<RunResult, ExplorerError> {
        self.sense()?;
        let mut need_replan = true;
        let mut since_replan = 0;
        let status = loop {
            if need_replan {
                if !self.replan()? {
                    break RunStatus::Complete;
                }
                need_replan = false;
                since_replan = 0;
            }
            if self.steps.is_empty() {
                self.record();
            }
            if self.state.step >= self.config.max_steps {
                break RunStatus::Budget;
            }
            let Some(&next) = self.path.front() else {
                need_replan = true;
                continue;
            };
            if self.blocked(next) {
                need_replan = true;
                continue;
            }
            self.path.pop_front();
            self.advance(next);
            self.sense()?;
            since_replan += 1;
            match self.state.target {
                Some((id, _)) if !self.state.active.contains(id) => need_replan = true,
                Some((id, p)) if p.distance(self.state.pose.position()) <= self.config.reach_radius() => {
                    self.state.active.mark_visited(id);
                    need_replan = true;
                }
                _ => {}
            }
            if since_replan >= self.config.replan_interval || self.path.is_empty() {
                need_replan = true;
            }
            self.record();
        };
        if self.steps.is_empty() {
            self.record();
        }
        let explored_reachable_cells = self.explored_reachable();
        let st = self.state;
        Ok(RunResult {
            planner: self.planner,
            status,
            speed: self.config.speed,
            steps: self.steps,
            known: st.known,
            frontiers: st.active.as_slice().to_vec(),
            subregions: st.subregions,
            reachable_cells: self.reachable_cells,
            explored_reachable_cells,
        })
    }
}

/// Explores `truth` from `start` until no frontier remains or the step
/// budget runs out.
pub fn run(truth: &OccupancyGrid, start: Pose, config: &RunConfig, planner: Planner) -> Result<RunResult, ExplorerError> {
    Explorer::new(truth, start, config, planner)?.run()
}

/// [`run`] with the nearest-frontier planner.
pub fn run_nearest_baseline(truth: &OccupancyGrid, start: Pose, config: &RunConfig) -> Result<RunResult, ExplorerError> {
    run(truth, start, config, Planner::Nearest)
}
