//! Frontier insertion between consecutive LiDAR returns.
//!
//! For each cyclically consecutive pair of returns `(l_i, l_{i+1})`,
//! including the seam pair `(last, first)`, a frontier is inserted when the
//! ranges differ by at least `r_gap` or the bearings are at least `theta_inf`
//! apart. Work is proportional to the number of returns; the map is never
//! touched.

use std::f64::consts::TAU;

use super::{FrontierCandidate, FrontierSource, SamplerConfig};
use crate::gridworld::{PolarScan, Pose, ScanReturn};

/// Fraction of `max_range` at which angular-gap frontiers are capped.
pub const CONDITION2_RANGE_CAP: f64 = 0.8;

/// Which insertion condition fired for a pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairOutcome {
    pub range_gap: bool,
    pub angular_gap: bool,
    /// Bearing of the inserted frontier, in `[0, 2pi)`.
    pub theta: f64,
    /// Distance of the inserted frontier from the sensor.
    pub range: f64,
}

/// Evaluates one consecutive pair. `delta_theta` is the forward angular gap
/// from `a` to `b` (already wrapped for the seam pair).
pub fn evaluate_pair(
    a: &ScanReturn,
    b: &ScanReturn,
    delta_theta: f64,
    config: &SamplerConfig,
    max_range: f64,
) -> Option<PairOutcome> {
    let range_gap = (b.range - a.range).abs() >= config.r_gap;
    let angular_gap = delta_theta >= config.theta_inf;
    if !range_gap && !angular_gap {
        return None;
    }
    let range = if range_gap {
        a.range.min(b.range) + config.r_gap / 2.0
    } else {
        ((a.range + b.range) / 2.0).min(CONDITION2_RANGE_CAP * max_range)
    };
    Some(PairOutcome {
        range_gap,
        angular_gap,
        theta: (a.theta + delta_theta / 2.0).rem_euclid(TAU),
        range,
    })
}

/// Work counters for one call of the scan detector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SamplingStats {
    /// Consecutive-pair evaluations, or ring insertions for an empty scan.
    pub operations: usize,
}

pub fn detect_scan_frontiers(scan: &PolarScan, pose: &Pose, config: &SamplerConfig) -> Vec<FrontierCandidate> {
    detect_scan_frontiers_with_stats(scan, pose, config).0
}

pub fn detect_scan_frontiers_with_stats(
    scan: &PolarScan,
    pose: &Pose,
    config: &SamplerConfig,
) -> (Vec<FrontierCandidate>, SamplingStats) {
    let origin = pose.position();
    let candidate = |theta: f64, range: f64| FrontierCandidate {
        position: origin.offset_polar(theta, range),
        source: FrontierSource::Scan,
    };
    let returns = &scan.returns;
    let mut stats = SamplingStats::default();
    if returns.is_empty() {
        // Nothing returned at all: ring of frontiers theta_inf apart.
        let count = (TAU / config.theta_inf + 1e-9).floor().max(1.0) as usize;
        let range = CONDITION2_RANGE_CAP * scan.max_range;
        stats.operations = count;
        let out = (0..count)
            .map(|k| candidate(k as f64 * config.theta_inf, range))
            .collect();
        return (out, stats);
    }
    let n = returns.len();
    let mut out = Vec::new();
    for i in 0..n {
        let a = &returns[i];
        let b = &returns[(i + 1) % n];
        let delta = if i + 1 < n {
            b.theta - a.theta
        } else {
            b.theta + TAU - a.theta
        };
        stats.operations += 1;
        if let Some(p) = evaluate_pair(a, b, delta, config, scan.max_range) {
            out.push(candidate(p.theta, p.range));
        }
    }
    (out, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ret(deg: f64, range: f64) -> ScanReturn {
        ScanReturn {
            theta: deg.to_radians(),
            range,
        }
    }

    fn config(r_gap: f64, theta_inf_deg: f64) -> SamplerConfig {
        SamplerConfig {
            r_gap,
            theta_inf: theta_inf_deg.to_radians(),
            ..SamplerConfig::default()
        }
    }

    #[test]
    fn range_jump_pair() {
        let c = config(1.0, 15.0);
        let p = evaluate_pair(&ret(10.0, 2.0), &ret(12.0, 5.0), 2f64.to_radians(), &c, 10.0).unwrap();
        assert!(p.range_gap && !p.angular_gap);
        assert!((p.theta.to_degrees() - 11.0).abs() < 1e-9);
        assert!((p.range - 2.5).abs() < 1e-12);
    }

    #[test]
    fn angular_gap_pair() {
        let c = config(1.0, 20.0);
        let p = evaluate_pair(&ret(0.0, 3.0), &ret(40.0, 3.5), 40f64.to_radians(), &c, 10.0).unwrap();
        assert!(!p.range_gap && p.angular_gap);
        assert!((p.theta.to_degrees() - 20.0).abs() < 1e-9);
        assert!((p.range - 3.25).abs() < 1e-12);
    }

    #[test]
    fn angular_gap_range_is_capped() {
        let c = config(5.0, 20.0);
        let p = evaluate_pair(&ret(0.0, 9.0), &ret(90.0, 9.5), 90f64.to_radians(), &c, 10.0).unwrap();
        assert!((p.range - 8.0).abs() < 1e-12);
    }

    #[test]
    fn two_return_scan_also_fires_on_the_seam() {
        let scan = PolarScan::from_returns(vec![ret(12.0, 5.0), ret(10.0, 2.0)], 10.0, 360);
        let out = detect_scan_frontiers(&scan, &Pose::new(0.0, 0.0, 0.0), &config(1.0, 15.0));
        assert_eq!(out.len(), 2);
        let p = out[0].position;
        assert!((p.y.atan2(p.x).to_degrees() - 11.0).abs() < 1e-9);
        assert!((p.x.hypot(p.y) - 2.5).abs() < 1e-12);
        // Seam pair (12 deg -> 370 deg) is a 358 deg gap with a 3 m jump.
        let q = out[1].position;
        assert!((q.y.atan2(q.x).to_degrees() - 191.0 + 360.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_ring_has_no_frontiers() {
        let returns = (0..360).map(|k| ret(k as f64, 4.0)).collect();
        let scan = PolarScan::from_returns(returns, 10.0, 360);
        let (out, stats) = detect_scan_frontiers_with_stats(&scan, &Pose::new(1.0, 1.0, 0.3), &config(1.0, 20.0));
        assert!(out.is_empty());
        assert_eq!(stats.operations, 360);
    }

    #[test]
    fn empty_scan_emits_a_ring() {
        let scan = PolarScan::from_returns(Vec::new(), 10.0, 360);
        let out = detect_scan_frontiers(&scan, &Pose::new(0.0, 0.0, 0.0), &config(1.0, 15.0));
        assert_eq!(out.len(), 24);
        for (k, f) in out.iter().enumerate() {
            assert!((f.position.x.hypot(f.position.y) - 8.0).abs() < 1e-9);
            let bearing = f.position.y.atan2(f.position.x).rem_euclid(TAU);
            let expected = (k as f64 * 15.0).to_radians();
            assert!((bearing - expected).abs() < 1e-9 || (bearing - expected).abs() > TAU - 1e-9);
        }
    }
}
