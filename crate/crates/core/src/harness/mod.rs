//! Configuration, bundled maps, benchmark orchestration and report output.

mod config;
mod maps;
mod svg;
mod tables;

use rayon::prelude::*;
use thiserror::Error;

use crate::explorer::{jittered_start, metrics, run, ExplorerError, Planner, RunConfig, RunResult};

pub use config::{
    load_config, parse_config, parse_config_onto, resolve_config, ConfigError, CONFIG_ENV, CONFIG_KEYS,
};
pub use maps::{bundled_map_names, bundled_map_text, resolve_map, MapError, NamedMap, BUNDLED_MAPS};
pub use svg::render_svg;
pub use tables::{describe, write_steps_csv, write_summary_csv, SummaryRow, STEPS_HEADER, SUMMARY_HEADER};

/// One run of `planner` on `map`, starting from the seed-jittered start pose.
pub fn run_scenario(map: &NamedMap, planner: Planner, seed: u64, config: &RunConfig) -> Result<RunResult, ExplorerError> {
    let start = jittered_start(&map.map.grid, map.map.start, seed, config.clearance);
    let config = RunConfig {
        rng_seed: seed,
        ..*config
    };
    run(&map.map.grid, start, &config, planner)
}

pub fn summary_row(map: &str, planner: Planner, seed: u64, result: &Result<RunResult, ExplorerError>) -> SummaryRow {
    let (status, metrics) = match result {
        Ok(r) => (r.status.name().to_string(), Some(metrics(r))),
        Err(_) => ("error".to_string(), None),
    };
    SummaryRow {
        map: map.to_string(),
        planner: planner.name().to_string(),
        seed: seed.to_string(),
        status,
        metrics,
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("benchmark needs at least one map, planner and seed")]
    Empty,
    #[error("cannot build a pool of {0} threads")]
    Pool(usize),
}

/// Which runs a benchmark performs.
#[derive(Clone, Debug)]
pub struct BenchmarkSpec {
    pub maps: Vec<NamedMap>,
    pub planners: Vec<Planner>,
    pub seeds: Vec<u64>,
    pub config: RunConfig,
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.maps.is_empty() || self.planners.is_empty() || self.seeds.is_empty() {
            return Err(BenchError::Empty);
        }
        Ok(())
    }
}

/// A finished run inside a benchmark.
#[derive(Debug)]
pub struct BenchRun {
    pub map: String,
    pub planner: Planner,
    pub seed: u64,
    pub result: Result<RunResult, ExplorerError>,
}

#[derive(Debug)]
pub struct BenchReport {
    /// Runs in (map, planner, seed) order.
    pub runs: Vec<BenchRun>,
}

impl BenchReport {
    /// Per-run rows followed by `mean`, `std` and `median` rows for every
    /// (map, planner) pair. Aggregates skip failed runs.
    pub fn rows(&self) -> Vec<SummaryRow> {
        let mut rows: Vec<SummaryRow> = self
            .runs
            .iter()
            .map(|r| summary_row(&r.map, r.planner, r.seed, &r.result))
            .collect();
        let mut groups: Vec<(String, String)> = Vec::new();
        for r in &rows {
            let key = (r.map.clone(), r.planner.clone());
            if !groups.contains(&key) {
                groups.push(key);
            }
        }
        let mut aggregates = Vec::new();
        for (map, planner) in groups {
            let ms: Vec<_> = rows
                .iter()
                .filter(|r| r.map == map && r.planner == planner)
                .filter_map(|r| r.metrics)
                .collect();
            let stat = |f: fn(&crate::explorer::MetricsRow) -> f64| describe(&ms.iter().map(f).collect::<Vec<_>>());
            let cols = [
                stat(|m| m.distance_m),
                stat(|m| m.time_s),
                stat(|m| m.rate_m2_per_m),
                stat(|m| m.completion),
                stat(|m| m.area_m2),
            ];
            for (label, pick) in [("mean", 0usize), ("std", 1), ("median", 2)] {
                let metrics = cols.iter().all(Option::is_some).then(|| {
                    let v: Vec<f64> = cols
                        .iter()
                        .map(|c| {
                            let (a, b, m) = c.expect("checked");
                            [a, b, m][pick]
                        })
                        .collect();
                    crate::explorer::MetricsRow {
                        distance_m: v[0],
                        time_s: v[1],
                        area_m2: v[4],
                        rate_m2_per_m: v[2],
                        completion: v[3],
                    }
                });
                aggregates.push(SummaryRow {
                    map: map.clone(),
                    planner: planner.clone(),
                    seed: label.to_string(),
                    status: "aggregate".to_string(),
                    metrics,
                });
            }
        }
        rows.extend(aggregates);
        rows
    }

    pub fn results(&self, map: &str, planner: Planner) -> impl Iterator<Item = &RunResult> + '_ {
        let map = map.to_string();
        self.runs
            .iter()
            .filter(move |r| r.map == map && r.planner == planner)
            .filter_map(|r| r.result.as_ref().ok())
    }
}

/// Runs every (map, planner, seed) cell on up to `jobs` threads. The report
/// order does not depend on `jobs`.
pub fn run_bench(spec: &BenchmarkSpec, jobs: usize) -> Result<BenchReport, BenchError> {
    spec.validate()?;
    let mut cells = Vec::new();
    for (mi, _) in spec.maps.iter().enumerate() {
        for &planner in &spec.planners {
            for &seed in &spec.seeds {
                cells.push((mi, planner, seed));
            }
        }
    }
    let jobs = jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|_| BenchError::Pool(jobs))?;
    let runs = pool.install(|| {
        cells
            .par_iter()
            .map(|&(mi, planner, seed)| {
                let map = &spec.maps[mi];
                BenchRun {
                    map: map.name.clone(),
                    planner,
                    seed,
                    result: run_scenario(map, planner, seed, &spec.config),
                }
            })
            .collect()
    });
    Ok(BenchReport { runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_is_rejected() {
        let spec = BenchmarkSpec {
            maps: vec![],
            planners: vec![Planner::Hphs],
            seeds: vec![1],
            config: RunConfig::default(),
        };
        assert_eq!(run_bench(&spec, 1).unwrap_err(), BenchError::Empty);
    }
}
