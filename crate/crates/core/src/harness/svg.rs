//! Static SVG picture of a finished run.

use std::fmt::Write;

use crate::explorer::RunResult;
use crate::gridworld::{CellState, Point};

/// Pixels per cell.
const SCALE: usize = 4;

/// Draws the known map, subregion grid, remaining frontiers and the
/// trajectory. Coordinates are in cell units with the y axis flipped so the
/// top of the map is up. Output depends only on `result`.
pub fn render_svg(result: &RunResult) -> String {
    let known = &result.known;
    let (w, h) = (known.width(), known.height());
    let res = known.resolution();
    let origin = known.origin();
    let to_svg = |p: Point| ((p.x - origin.x) / res, h as f64 - (p.y - origin.y) / res);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {w} {h}">"#,
        w * SCALE,
        h * SCALE
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#9e9e9e"/>"##);

    for (state, fill) in [(CellState::Free, "#ffffff"), (CellState::Occupied, "#202020")] {
        let mut d = String::new();
        for y in 0..h {
            let row = &known.cells()[y * w..(y + 1) * w];
            let top = h - 1 - y;
            let mut x = 0;
            while x < w {
                if row[x] != state {
                    x += 1;
                    continue;
                }
                let run_start = x;
                while x < w && row[x] == state {
                    x += 1;
                }
                let _ = write!(d, "M{run_start} {top}h{}v1h-{}z", x - run_start, x - run_start);
            }
        }
        if !d.is_empty() {
            let _ = writeln!(s, r#"<path fill="{fill}" d="{d}"/>"#);
        }
    }

    if let Some(grid) = &result.subregions {
        let b = grid.bounds;
        let (x0, y1) = to_svg(b.min);
        let (x1, y0) = to_svg(b.max);
        let mut lines = String::new();
        for i in 0..=grid.n_w {
            let x = x0 + (x1 - x0) * i as f64 / grid.n_w as f64;
            let _ = write!(lines, "M{x:.2} {y0:.2}V{y1:.2}");
        }
        for j in 0..=grid.n_h {
            let y = y0 + (y1 - y0) * j as f64 / grid.n_h as f64;
            let _ = write!(lines, "M{x0:.2} {y:.2}H{x1:.2}");
        }
        let _ = writeln!(s, r##"<path fill="none" stroke="#1e88e5" stroke-width="0.4" d="{lines}"/>"##);
    }

    for f in &result.frontiers {
        let (x, y) = to_svg(f.position);
        let _ = writeln!(s, r##"<circle class="frontier" cx="{x:.2}" cy="{y:.2}" r="1.2" fill="#e53935"/>"##);
    }

    let points: Vec<String> = result
        .trajectory()
        .map(|p| {
            let (x, y) = to_svg(p.position());
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#43a047" stroke-width="0.6" points="{}"/>"##,
        points.join(" ")
    );
    if let (Some(first), Some(last)) = (result.steps.first(), result.steps.last()) {
        for (class, pose, fill) in [("start", first.pose, "#43a047"), ("end", last.pose, "#fb8c00")] {
            let (x, y) = to_svg(pose.position());
            let _ = writeln!(s, r#"<circle class="{class}" cx="{x:.2}" cy="{y:.2}" r="1.8" fill="{fill}"/>"#);
        }
    }
    s.push_str("</svg>\n");
    s
}
