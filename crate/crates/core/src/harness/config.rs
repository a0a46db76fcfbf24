//! Flat `key = value` configuration files.
//!
//! ```text
//! # comments start with '#'
//! sampler.r_gap = 1.0
//! weights.tau3 = 1.2
//! ```
//!
//! Every key overrides one field of [`RunConfig`]; unknown keys are errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::explorer::{ExplorerError, RunConfig};
use crate::hierarchy::SolverMode;

/// Environment variable consulted when no config path is given.
pub const CONFIG_ENV: &str = "HPHS_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    Value { line: usize, key: String, value: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error(transparent)]
    Invalid(#[from] ExplorerError),
}

/// Every recognised key, in documentation order.
pub const CONFIG_KEYS: &[&str] = &[
    "grid.resolution",
    "scan.beams",
    "scan.max_range",
    "planner.clearance",
    "sampler.r_gap",
    "sampler.theta_inf_deg",
    "sampler.d_s",
    "sampler.clearance_radius",
    "sampler.dedup_radius",
    "subregion.n_w",
    "subregion.n_h",
    "sequence.lambda1",
    "sequence.lambda2",
    "sequence.lambda3",
    "sequence.solver",
    "weights.tau1",
    "weights.tau2",
    "weights.tau3",
    "weights.kernel_k",
    "weights.s_occupied",
    "weights.s_free",
    "weights.s_unknown",
    "run.speed",
    "run.replan_interval",
    "run.max_steps",
    "run.seed",
];

fn parse_solver(v: &str) -> Option<SolverMode> {
    match v {
        "auto" => Some(SolverMode::Auto),
        "exhaustive" => Some(SolverMode::Exhaustive),
        "heuristic" => Some(SolverMode::Heuristic),
        _ => None,
    }
}

/// Applies one `key = value` pair. Returns `None` for an unknown key and
/// `Some(false)` for a value that does not parse.
fn apply(config: &mut RunConfig, key: &str, value: &str) -> Option<bool> {
    fn set<T: FromStr>(slot: &mut T, v: &str) -> bool {
        v.parse().map(|x| *slot = x).is_ok()
    }
    let c = config;
    let ok = match key {
        "grid.resolution" => set(&mut c.resolution, value),
        "scan.beams" => set(&mut c.scan.beams, value),
        "scan.max_range" => set(&mut c.scan.max_range, value),
        "planner.clearance" => set(&mut c.clearance, value),
        "sampler.r_gap" => set(&mut c.sampler.r_gap, value),
        "sampler.theta_inf_deg" => {
            let mut deg = 0.0f64;
            let ok = set(&mut deg, value);
            c.sampler.theta_inf = deg.to_radians();
            ok
        }
        "sampler.d_s" => set(&mut c.sampler.d_s, value),
        "sampler.clearance_radius" => set(&mut c.sampler.clearance_radius, value),
        "sampler.dedup_radius" => set(&mut c.sampler.dedup_radius, value),
        "subregion.n_w" => set(&mut c.n_w, value),
        "subregion.n_h" => set(&mut c.n_h, value),
        "sequence.lambda1" => set(&mut c.sequence.lambda1, value),
        "sequence.lambda2" => set(&mut c.sequence.lambda2, value),
        "sequence.lambda3" => set(&mut c.sequence.lambda3, value),
        "sequence.solver" => parse_solver(value).map(|s| c.solver = s).is_some(),
        "weights.tau1" => set(&mut c.gains.tau1, value),
        "weights.tau2" => set(&mut c.gains.tau2, value),
        "weights.tau3" => set(&mut c.gains.tau3, value),
        "weights.kernel_k" => set(&mut c.gains.kernel_k, value),
        "weights.s_occupied" => set(&mut c.gains.s_occupied, value),
        "weights.s_free" => set(&mut c.gains.s_free, value),
        "weights.s_unknown" => set(&mut c.gains.s_unknown, value),
        "run.speed" => set(&mut c.speed, value),
        "run.replan_interval" => set(&mut c.replan_interval, value),
        "run.max_steps" => set(&mut c.max_steps, value),
        "run.seed" => set(&mut c.rng_seed, value),
        _ => return None,
    };
    Some(ok)
}

/// Parses config text on top of `base` and validates the result.
pub fn parse_config_onto(text: &str, base: RunConfig) -> Result<RunConfig, ConfigError> {
    let mut config = base;
    let mut seen: Vec<&str> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        if seen.contains(&key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        match apply(&mut config, key, value) {
            None => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
            Some(false) => {
                return Err(ConfigError::Value {
                    line,
                    key: key.to_string(),
                    value: value.to_string(),
                })
            }
            Some(true) => seen.push(key),
        }
    }
    config.validate()?;
    Ok(config)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_onto(text, RunConfig::default())
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Loads `explicit` if given, else the file named by `HPHS_CONFIG`, else defaults.
pub fn resolve_config(explicit: Option<&Path>) -> Result<RunConfig, ConfigError> {
    match explicit {
        Some(p) => load_config(p),
        None => match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => load_config(Path::new(&p)),
            _ => Ok(RunConfig::default()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_comments() {
        let c = parse_config(
            "# tuned\nsampler.r_gap = 1.5\nweights.tau3=2.0   # trailing\n\nsampler.theta_inf_deg = 30\nsequence.solver = heuristic\n",
        )
        .unwrap();
        assert_eq!(c.sampler.r_gap, 1.5);
        assert_eq!(c.gains.tau3, 2.0);
        assert!((c.sampler.theta_inf - 30f64.to_radians()).abs() < 1e-15);
        assert_eq!(c.solver, SolverMode::Heuristic);
        assert_eq!(c.speed, 0.6);
    }

    #[test]
    fn every_documented_key_is_accepted() {
        let defaults = RunConfig::default();
        for key in CONFIG_KEYS {
            let mut c = defaults;
            let value = if *key == "sequence.solver" { "auto" } else { "3" };
            assert_eq!(apply(&mut c, key, value), Some(true), "{key}");
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config("run.speed = 1\nsampler.rgap = 1.0\n").unwrap_err();
        assert!(matches!(e, ConfigError::UnknownKey { line: 2, .. }));
        assert!(e.to_string().contains("sampler.rgap"));
        assert!(matches!(parse_config("run.speed 1"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(parse_config("scan.beams = many"), Err(ConfigError::Value { .. })));
        assert!(matches!(parse_config("run.speed = 1\nrun.speed = 2"), Err(ConfigError::Duplicate { line: 2, .. })));
        assert!(matches!(parse_config("weights.kernel_k = 4"), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn missing_file_names_path() {
        let e = load_config(Path::new("/nonexistent/hphs.conf")).unwrap_err();
        assert!(e.to_string().contains("/nonexistent/hphs.conf"));
    }
}
