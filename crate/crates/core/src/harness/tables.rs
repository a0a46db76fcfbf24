//! CSV output: per-step logs, run summaries and benchmark tables.

use std::io::Write;

use crate::explorer::{MetricsRow, RunResult};

pub const STEPS_HEADER: [&str; 11] = [
    "step",
    "sim_time_s",
    "x_m",
    "y_m",
    "traveled_m",
    "explored_m2",
    "completion",
    "frontiers",
    "subregions",
    "target_x",
    "target_y",
];

pub const SUMMARY_HEADER: [&str; 8] = [
    "map",
    "planner",
    "seed",
    "status",
    "distance_m",
    "time_s",
    "rate_m2_per_m",
    "completion",
];

pub fn write_steps_csv<W: Write>(out: W, result: &RunResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STEPS_HEADER)?;
    for s in &result.steps {
        let (tx, ty) = match s.target {
            Some(t) => (format!("{:.3}", t.x), format!("{:.3}", t.y)),
            None => (String::new(), String::new()),
        };
        w.write_record([
            s.step.to_string(),
            format!("{:.3}", s.sim_time),
            format!("{:.3}", s.pose.x),
            format!("{:.3}", s.pose.y),
            format!("{:.3}", s.traveled),
            format!("{:.2}", s.explored_m2),
            format!("{:.6}", s.completion),
            s.frontiers.to_string(),
            s.subregions.to_string(),
            tx,
            ty,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of a summary or benchmark table. `metrics` is `None` for a failed run.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub map: String,
    pub planner: String,
    /// Seed, or `mean` / `std` / `median` for aggregate rows.
    pub seed: String,
    /// `complete`, `budget`, `error` or `aggregate`.
    pub status: String,
    pub metrics: Option<MetricsRow>,
}

impl SummaryRow {
    fn fields(&self) -> [String; 8] {
        let nums = match &self.metrics {
            Some(m) => [
                format!("{:.3}", m.distance_m),
                format!("{:.3}", m.time_s),
                format!("{:.4}", m.rate_m2_per_m),
                format!("{:.6}", m.completion),
            ],
            None => Default::default(),
        };
        let [d, t, r, c] = nums;
        [
            self.map.clone(),
            self.planner.clone(),
            self.seed.clone(),
            self.status.clone(),
            d,
            t,
            r,
            c,
        ]
    }
}

pub fn write_summary_csv<W: Write>(out: W, rows: &[SummaryRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Arithmetic mean, population standard deviation and median.
pub fn describe(values: &[f64]) -> Option<(f64, f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    Some((mean, var.sqrt(), median))
}
