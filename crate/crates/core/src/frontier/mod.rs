//! Hybrid frontier sampling and the frontier filter.
//!
//! Candidates come from two detectors: discontinuities in the LiDAR scan
//! ([`detect_scan_frontiers`]) and boundary clusters in the local map around
//! the robot ([`detect_local_frontiers`]). [`filter_frontiers`] admits
//! candidates into the active [`FrontierSet`]; [`prune_frontiers`] retires
//! active frontiers that were mapped through or cannot be reached.

mod filter;
mod local;
mod scan;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridworld::Point;

pub use filter::{filter_frontiers, prune_frontiers, PlannerReachability, Reachability};
pub use local::detect_local_frontiers;
pub use scan::{
    detect_scan_frontiers, detect_scan_frontiers_with_stats, evaluate_pair, PairOutcome, SamplingStats,
    CONDITION2_RANGE_CAP,
};

pub type FrontierId = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrontierSource {
    /// Inserted between two consecutive scan returns.
    Scan,
    /// Found on the Free/Unknown boundary of the local map.
    LocalMap,
}

/// Output of a detector, before filtering.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierCandidate {
    pub position: Point,
    pub source: FrontierSource,
}

/// A frontier admitted into the active set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub id: FrontierId,
    pub position: Point,
    pub source: FrontierSource,
    pub created_step: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerConfigError {
    #[error("sampler.{0} must be strictly positive")]
    NotPositive(&'static str),
    #[error("sampler.theta_inf ({theta_inf:.4} rad) must exceed the scan spacing ({spacing:.4} rad)")]
    ThetaInfTooSmall { theta_inf: f64, spacing: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Range jump between consecutive returns that inserts a frontier (m).
    pub r_gap: f64,
    /// Angular gap between consecutive returns that inserts a frontier (rad).
    pub theta_inf: f64,
    /// Radius of the local map searched for boundary clusters (m).
    pub d_s: f64,
    /// Candidates this close to an Occupied cell are rejected (m).
    pub clearance_radius: f64,
    /// Radius for duplicate suppression and the mapped-through test (m).
    pub dedup_radius: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            r_gap: 1.0,
            theta_inf: 15f64.to_radians(),
            d_s: 6.0,
            clearance_radius: 0.3,
            dedup_radius: 1.0,
        }
    }
}

impl SamplerConfig {
    /// Checks positivity, and that `theta_inf` exceeds the spacing of a scan with `beams` beams.
    pub fn validate(&self, beams: usize) -> Result<(), SamplerConfigError> {
        for (name, v) in [
            ("r_gap", self.r_gap),
            ("theta_inf", self.theta_inf),
            ("d_s", self.d_s),
            ("clearance_radius", self.clearance_radius),
            ("dedup_radius", self.dedup_radius),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SamplerConfigError::NotPositive(name));
            }
        }
        let spacing = std::f64::consts::TAU / beams.max(1) as f64;
        if self.theta_inf <= spacing {
            return Err(SamplerConfigError::ThetaInfTooSmall {
                theta_inf: self.theta_inf,
                spacing,
            });
        }
        Ok(())
    }
}

/// The active frontier set of one run, plus the spots the robot has already
/// reached as targets.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrontierSet {
    frontiers: Vec<FrontierPoint>,
    visited: Vec<Point>,
    next_id: FrontierId,
}

impl FrontierSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.frontiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frontiers.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FrontierPoint> + '_ {
        self.frontiers.iter()
    }

    pub fn as_slice(&self) -> &[FrontierPoint] {
        &self.frontiers
    }

    pub fn get(&self, id: FrontierId) -> Option<&FrontierPoint> {
        self.frontiers.iter().find(|f| f.id == id)
    }

    pub fn contains(&self, id: FrontierId) -> bool {
        self.get(id).is_some()
    }

    pub fn insert(&mut self, position: Point, source: FrontierSource, step: u64) -> FrontierId {
        let id = self.next_id;
        self.next_id += 1;
        self.frontiers.push(FrontierPoint {
            id,
            position,
            source,
            created_step: step,
        });
        id
    }

    pub fn remove(&mut self, id: FrontierId) -> Option<FrontierPoint> {
        let i = self.frontiers.iter().position(|f| f.id == id)?;
        Some(self.frontiers.remove(i))
    }

    /// Removes `id` and remembers its position as visited.
    pub fn mark_visited(&mut self, id: FrontierId) {
        if let Some(f) = self.remove(id) {
            self.visited.push(f.position);
        }
    }

    pub fn visited(&self) -> &[Point] {
        &self.visited
    }

    pub(crate) fn retain(&mut self, mut keep: impl FnMut(&FrontierPoint) -> bool) -> Vec<FrontierId> {
        let mut removed = Vec::new();
        self.frontiers.retain(|f| {
            let k = keep(f);
            if !k {
                removed.push(f.id);
            }
            k
        });
        removed
    }
}
