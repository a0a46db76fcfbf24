//! Line-delimited JSON form of a [`RunResult`].
//!
//! One record per line: a `run` header, one `step` per step, a `known` map
//! snapshot, one `frontier` per remaining frontier and an optional
//! `subregions` record.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Planner, RunResult, RunStatus, StepRecord};
use crate::frontier::FrontierPoint;
use crate::gridworld::{CellState, GridError, OccupancyGrid, Point};
use crate::hierarchy::SubregionGrid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum RunRecord {
    Run {
        planner: Planner,
        status: RunStatus,
        speed: f64,
        reachable_cells: usize,
        explored_reachable_cells: usize,
    },
    Step(StepRecord),
    Known {
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point,
        /// Top row first; `.` Free, `#` Occupied, `?` Unknown.
        rows: Vec<String>,
    },
    Frontier(FrontierPoint),
    Subregions(SubregionGrid),
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: bad map row")]
    Row { line: usize },
    #[error("missing `{0}` record")]
    Missing(&'static str),
    #[error(transparent)]
    Grid(#[from] GridError),
}

fn encode(s: CellState) -> char {
    match s {
        CellState::Free => '.',
        CellState::Occupied => '#',
        CellState::Unknown => '?',
    }
}

fn decode(c: char) -> Option<CellState> {
    match c {
        '.' => Some(CellState::Free),
        '#' => Some(CellState::Occupied),
        '?' => Some(CellState::Unknown),
        _ => None,
    }
}

impl RunResult {
    pub fn records(&self) -> Vec<RunRecord> {
        let mut out = vec![RunRecord::Run {
            planner: self.planner,
            status: self.status,
            speed: self.speed,
            reachable_cells: self.reachable_cells,
            explored_reachable_cells: self.explored_reachable_cells,
        }];
        out.extend(self.steps.iter().copied().map(RunRecord::Step));
        let (w, h) = (self.known.width(), self.known.height());
        let rows = (0..h)
            .rev()
            .map(|y| self.known.cells()[y * w..(y + 1) * w].iter().map(|&s| encode(s)).collect())
            .collect();
        out.push(RunRecord::Known {
            width: w,
            height: h,
            resolution: self.known.resolution(),
            origin: self.known.origin(),
            rows,
        });
        out.extend(self.frontiers.iter().copied().map(RunRecord::Frontier));
        if let Some(g) = &self.subregions {
            out.push(RunRecord::Subregions(g.clone()));
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in self.records() {
            s.push_str(&serde_json::to_string(&r).expect("records serialize"));
            s.push('\n');
        }
        s
    }

    pub fn from_jsonl(text: &str) -> Result<RunResult, RecordError> {
        let mut header = None;
        let mut steps = Vec::new();
        let mut known = None;
        let mut frontiers = Vec::new();
        let mut subregions = None;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let rec: RunRecord = serde_json::from_str(line).map_err(|source| RecordError::Json { line: i + 1, source })?;
            match rec {
                RunRecord::Run { .. } => header = Some(rec),
                RunRecord::Step(s) => steps.push(s),
                RunRecord::Known {
                    width,
                    height,
                    resolution,
                    origin,
                    rows,
                } => {
                    let mut cells = vec![CellState::Unknown; width * height];
                    if rows.len() != height {
                        return Err(RecordError::Row { line: i + 1 });
                    }
                    for (r, row) in rows.iter().enumerate() {
                        let y = height - 1 - r;
                        let states: Option<Vec<_>> = row.chars().map(decode).collect();
                        match states {
                            Some(v) if v.len() == width => cells[y * width..(y + 1) * width].copy_from_slice(&v),
                            _ => return Err(RecordError::Row { line: i + 1 }),
                        }
                    }
                    known = Some(OccupancyGrid::from_cells(width, height, resolution, origin, cells)?);
                }
                RunRecord::Frontier(f) => frontiers.push(f),
                RunRecord::Subregions(g) => subregions = Some(g),
            }
        }
        let Some(RunRecord::Run {
            planner,
            status,
            speed,
            reachable_cells,
            explored_reachable_cells,
        }) = header
        else {
            return Err(RecordError::Missing("run"));
        };
        if steps.is_empty() {
            return Err(RecordError::Missing("step"));
        }
        Ok(RunResult {
            planner,
            status,
            speed,
            steps,
            known: known.ok_or(RecordError::Missing("known"))?,
            frontiers,
            subregions,
            reachable_cells,
            explored_reachable_cells,
        })
    }
}
