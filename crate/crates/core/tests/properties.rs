use std::f64::consts::PI;

use hphs_core::explorer::{run, Planner, RunConfig};
use hphs_core::frontier::{
    detect_local_frontiers, detect_scan_frontiers_with_stats, prune_frontiers, FrontierPoint, FrontierSet,
    FrontierSource, Reachability, SamplerConfig,
};
use hphs_core::gridworld::{integrate_scan, simulate_scan, Cell, CellState, OccupancyGrid, Point, PolarScan, Pose, ScanReturn};
use hphs_core::hierarchy::{compute_bounds, dtw_distance, segment, sequence_revenue, Rect, SequenceWeights};
use hphs_core::selection::{
    information_gain, orientation_gain_from_angle, score_candidates, select_target, GainBreakdown, GainWeights,
};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-20.0..20.0f64, -20.0..20.0f64).prop_map(|(x, y)| Point::new(x, y))
}

fn points(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point(), 1..=max)
}

/// Walled room of `side` cells with random interior pillars; the centre
/// cell is always free.
fn room(side: usize, pillars: &[(u8, u8)]) -> OccupancyGrid {
    let mut g = OccupancyGrid::new(side, side, 0.1, Point::new(0.0, 0.0), CellState::Free).unwrap();
    let s = side as i32;
    for k in 0..s {
        for c in [Cell::new(k, 0), Cell::new(k, s - 1), Cell::new(0, k), Cell::new(s - 1, k)] {
            g.set(c, CellState::Occupied);
        }
    }
    let mid = s / 2;
    for &(x, y) in pillars {
        let (x, y) = (2 + x as i32 % (s - 4), 2 + y as i32 % (s - 4));
        if (x - mid).abs() > 3 || (y - mid).abs() > 3 {
            g.set(Cell::new(x, y), CellState::Occupied);
            g.set(Cell::new(x + 1, y), CellState::Occupied);
        }
    }
    g
}

fn small_config() -> RunConfig {
    RunConfig {
        max_steps: 5_000,
        scan: hphs_core::explorer::ScanConfig {
            beams: 180,
            max_range: 4.0,
        },
        ..RunConfig::default()
    }
}

fn breakdown(id: u64, d: f64, o: f64, i: f64) -> GainBreakdown {
    GainBreakdown {
        id,
        g_distance: d,
        g_orientation: o,
        g_information: i,
        total: 0.0,
    }
}

proptest! {
    #[test]
    fn dtw_is_symmetric_non_negative_and_zero_on_itself(a in points(10), b in points(10)) {
        let ab = dtw_distance(&a, &b);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - dtw_distance(&b, &a)).abs() < 1e-9);
        prop_assert_eq!(dtw_distance(&a, &a), 0.0);
    }

    #[test]
    fn subregions_tile_the_bounds(
        x0 in -10.0..10.0f64, y0 in -10.0..10.0f64,
        w in 0.5..30.0f64, h in 0.5..30.0f64,
        n_w in 1usize..7, n_h in 1usize..7,
    ) {
        let bounds = Rect::new(Point::new(x0, y0), Point::new(x0 + w, y0 + h));
        let grid = segment(bounds, n_w, n_h, &[]).unwrap();
        prop_assert_eq!(grid.subregions.len(), n_w * n_h);
        let area: f64 = grid.subregions.iter().map(|s| s.rect.width() * s.rect.height()).sum();
        prop_assert!((area - w * h).abs() < 1e-9 * (1.0 + w * h));
        for (i, a) in grid.subregions.iter().enumerate() {
            prop_assert!(bounds.contains_rect(&a.rect));
            for b in &grid.subregions[i + 1..] {
                let ox = a.rect.max.x.min(b.rect.max.x) - a.rect.min.x.max(b.rect.min.x);
                let oy = a.rect.max.y.min(b.rect.max.y) - a.rect.min.y.max(b.rect.min.y);
                prop_assert!(ox <= 1e-9 || oy <= 1e-9);
            }
        }
    }

    #[test]
    fn frontiers_land_in_the_subregion_that_contains_them(
        ps in prop::collection::vec((0.0..20.0f64, 0.0..10.0f64), 1..20),
    ) {
        let bounds = Rect::new(Point::new(0.0, 0.0), Point::new(20.0, 10.0));
        let fs: Vec<FrontierPoint> = ps.iter().enumerate().map(|(k, &(x, y))| FrontierPoint {
            id: k as u64,
            position: Point::new(x, y),
            source: FrontierSource::Scan,
            created_step: 0,
        }).collect();
        let grid = segment(bounds, 4, 2, &fs).unwrap();
        let mut seen = 0;
        for s in &grid.subregions {
            for id in &s.frontiers {
                prop_assert!(s.rect.contains(fs[*id as usize].position));
                seen += 1;
            }
        }
        prop_assert_eq!(seen, fs.len());
        prop_assert!(grid.filtered().all(|s| !s.frontiers.is_empty()));
    }

    /// Mirroring an order across the axis through the robot keeps every leg
    /// length, so only the DTW term can separate the two.
    #[test]
    fn revenue_prefers_the_order_closer_to_the_previous_one(
        raw in prop::collection::vec((-10.0..10.0f64, 0.5..10.0f64), 1..7),
        jitter in prop::collection::vec((-0.3..0.3f64, -0.3..0.3f64), 7),
    ) {
        let w = SequenceWeights::default();
        let robot = Point::new(0.0, 0.0);
        let a: Vec<Point> = raw.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let b: Vec<Point> = a.iter().map(|p| Point::new(p.x, -p.y)).collect();
        let previous: Vec<Point> = a.iter().zip(&jitter).map(|(p, j)| Point::new(p.x + j.0, p.y + j.1)).collect();
        let (da, db) = (dtw_distance(&a, &previous), dtw_distance(&b, &previous));
        prop_assume!(db - da > 1e-6);
        prop_assert!(sequence_revenue(&a, robot, &previous, &w) > sequence_revenue(&b, robot, &previous, &w));
    }

    #[test]
    fn selection_ignores_affine_shifts_of_raw_gains(
        raw in prop::collection::vec((0.0..20.0f64, 0.1..8.0f64, 1.0..3.0f64), 1..8),
        shift in 0.0..50.0f64,
        scale in 0.1..10.0f64,
    ) {
        let w = GainWeights::default();
        let mut base: Vec<GainBreakdown> = raw.iter().enumerate()
            .map(|(k, &(d, o, i))| breakdown(k as u64, d, o, i)).collect();
        let mut moved: Vec<GainBreakdown> = raw.iter().enumerate()
            .map(|(k, &(d, o, i))| breakdown(k as u64, d + shift, o, i * scale)).collect();
        let a = score_candidates(&mut base, &w).unwrap();
        let b = score_candidates(&mut moved, &w).unwrap();
        // Near-ties may legitimately flip under rounding.
        if a != b {
            prop_assert!((base[a].total - base[b].total).abs() < 1e-9);
        }
        for g in &base {
            prop_assert!(g.total >= -w.tau1 - w.tau2 - 1e-12 && g.total <= w.tau3 + 1e-12);
        }
    }

    #[test]
    fn orientation_gain_increases_with_deviation(a in 0.0..PI, b in 0.0..PI) {
        prop_assume!(a < b);
        prop_assert!(orientation_gain_from_angle(a) < orientation_gain_from_angle(b));
    }

    #[test]
    fn revealing_unknown_never_lowers_information_gain(
        cells in prop::collection::vec((0u8..3, 0u8..9, 0u8..9), 0..60),
        flip in (0i32..9, 0i32..9),
    ) {
        let w = GainWeights::default();
        let mut g = OccupancyGrid::new(9, 9, 0.1, Point::new(0.0, 0.0), CellState::Free).unwrap();
        for &(s, x, y) in &cells {
            let s = [CellState::Free, CellState::Occupied, CellState::Unknown][s as usize];
            g.set(Cell::new(x as i32, y as i32), s);
        }
        let center = Point::new(0.45, 0.45);
        let c = Cell::new(flip.0, flip.1);
        prop_assume!(g.get(c) == Some(CellState::Free));
        let before = information_gain(&g, center, &w);
        g.set(c, CellState::Unknown);
        prop_assert!(information_gain(&g, center, &w) >= before);
    }

    #[test]
    fn distance_only_selection_is_nearest(
        ps in prop::collection::vec((0.5..9.5f64, 0.5..9.5f64), 1..8),
        rx in 0.5..9.5f64, ry in 0.5..9.5f64, heading in -PI..PI,
    ) {
        let g = OccupancyGrid::new(100, 100, 0.1, Point::new(0.0, 0.0), CellState::Free).unwrap();
        let w = GainWeights { tau2: 0.0, tau3: 0.0, ..GainWeights::default() };
        let fs: Vec<FrontierPoint> = ps.iter().enumerate().map(|(k, &(x, y))| FrontierPoint {
            id: k as u64,
            position: Point::new(x, y),
            source: FrontierSource::LocalMap,
            created_step: 0,
        }).collect();
        let refs: Vec<&FrontierPoint> = fs.iter().collect();
        let robot = Pose::new(rx, ry, heading);
        let sel = select_target(&refs, &robot, &g, &w).unwrap();
        let nearest = fs.iter()
            .min_by(|a, b| robot.position().distance(a.position)
                .total_cmp(&robot.position().distance(b.position))
                .then(a.id.cmp(&b.id)))
            .unwrap();
        prop_assert_eq!(sel.target, nearest.id);
    }

    #[test]
    fn scan_sampling_work_is_one_step_per_return(
        ranges in prop::collection::vec(prop::option::of(0.2..9.0f64), 8..400),
    ) {
        let beams = ranges.len();
        let returns: Vec<ScanReturn> = ranges.iter().enumerate().filter_map(|(k, r)| r.map(|range| ScanReturn {
            theta: (k as f64 + 0.5) * 2.0 * PI / beams as f64,
            range,
        })).collect();
        let n = returns.len();
        let scan = PolarScan::from_returns(returns, 10.0, beams);
        let cfg = SamplerConfig { theta_inf: (4.0 * PI / beams as f64).max(0.05), ..SamplerConfig::default() };
        let (out, stats) = detect_scan_frontiers_with_stats(&scan, &Pose::new(0.0, 0.0, 0.0), &cfg);
        if n > 0 {
            prop_assert_eq!(stats.operations, n);
            prop_assert!(out.len() <= n);
        }
    }

    #[test]
    fn local_clusters_have_at_least_three_cells(
        cells in prop::collection::vec((0u8..3, 0u8..40, 0u8..40), 0..400),
        px in 0.0..4.0f64, py in 0.0..4.0f64, d_s in 0.3..3.0f64,
    ) {
        let mut g = OccupancyGrid::new(40, 40, 0.1, Point::new(0.0, 0.0), CellState::Unknown).unwrap();
        for &(s, x, y) in &cells {
            let s = [CellState::Free, CellState::Occupied, CellState::Unknown][s as usize];
            g.set(Cell::new(x as i32, y as i32), s);
        }
        let pose = Pose::new(px, py, 0.0);
        let out = detect_local_frontiers(&g, &pose, d_s);
        let boundary = g.cells_in_disk(pose.position(), d_s).filter(|&c| g.is_frontier_cell(c)).count();
        prop_assert!(out.len() * 3 <= boundary);
        for f in &out {
            prop_assert!(g.is_frontier_cell(g.cell_of(f.position)));
            prop_assert!(f.position.distance(pose.position()) <= d_s + 1e-9);
        }
    }

    #[test]
    fn pruned_frontiers_all_see_unknown(
        cells in prop::collection::vec((0u8..3, 0u8..30, 0u8..30), 0..300),
        ps in prop::collection::vec((0.0..3.0f64, 0.0..3.0f64), 0..20),
    ) {
        struct Everywhere;
        impl Reachability for Everywhere {
            fn is_reachable(&self, _: Point) -> bool { true }
        }
        let mut g = OccupancyGrid::new(30, 30, 0.1, Point::new(0.0, 0.0), CellState::Free).unwrap();
        for &(s, x, y) in &cells {
            let s = [CellState::Free, CellState::Occupied, CellState::Unknown][s as usize];
            g.set(Cell::new(x as i32, y as i32), s);
        }
        let cfg = SamplerConfig::default();
        let mut set = FrontierSet::new();
        for &(x, y) in &ps {
            set.insert(Point::new(x, y), FrontierSource::Scan, 0);
        }
        prune_frontiers(&mut set, &g, &Everywhere, &cfg);
        for f in set.iter() {
            let free = g.state_at(f.position) == Some(CellState::Free);
            prop_assert!(!free || g.has_open_unknown_within(f.position, cfg.dedup_radius));
        }
    }

    #[test]
    fn bounds_grow_and_knowledge_accumulates(
        pillars in prop::collection::vec((0u8..255, 0u8..255), 0..30),
        moves in prop::collection::vec((-0.8..0.8f64, -0.8..0.8f64), 1..8),
    ) {
        let truth = room(40, &pillars);
        let mut known = truth.unknown_like();
        let mut pose = Pose::new(2.05, 2.05, 0.0);
        let mut prev_bounds: Option<Rect> = None;
        let mut prev_known = 0;
        for (dx, dy) in moves {
            let next = Pose::new(pose.x + dx, pose.y + dy, 0.0);
            if truth.state_at(next.position()) == Some(CellState::Free) {
                pose = next;
            }
            let scan = simulate_scan(&truth, &pose, 120, 3.0).unwrap();
            integrate_scan(&mut known, &scan, &pose);
            let b = compute_bounds(&known).unwrap();
            if let Some(p) = prev_bounds {
                prop_assert!(b.contains_rect(&p));
            }
            let k = known.known_count();
            prop_assert!(k >= prev_known);
            // Nothing mapped Occupied is Free in truth and vice versa.
            for (c, s) in known.iter_cells() {
                if s != CellState::Unknown {
                    prop_assert_eq!(truth.get(c), Some(s));
                }
            }
            prev_bounds = Some(b);
            prev_known = k;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_safe_monotone_and_deterministic(
        pillars in prop::collection::vec((0u8..255, 0u8..255), 0..25),
        hphs in any::<bool>(),
    ) {
        let truth = room(40, &pillars);
        let planner = if hphs { Planner::Hphs } else { Planner::Nearest };
        let cfg = small_config();
        let start = Pose::new(2.05, 2.05, 0.3);
        let r = run(&truth, start, &cfg, planner).unwrap();
        let mut last = r.steps[0];
        let mut path = 0.0;
        for (i, s) in r.steps.iter().enumerate() {
            prop_assert_eq!(truth.state_at(s.pose.position()), Some(CellState::Free));
            prop_assert!(s.explored_m2 >= last.explored_m2);
            prop_assert!(s.completion >= last.completion);
            if i > 0 {
                path += last.pose.position().distance(s.pose.position());
            }
            prop_assert!((s.traveled - path).abs() < 1e-9 * (i as f64 + 1.0));
            prop_assert!((s.sim_time - s.traveled / cfg.speed).abs() < 1e-9);
            last = *s;
        }
        let again = run(&truth, start, &cfg, planner).unwrap();
        prop_assert_eq!(r.to_jsonl(), again.to_jsonl());
    }
}
