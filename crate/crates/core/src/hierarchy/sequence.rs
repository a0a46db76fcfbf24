use serde::{Deserialize, Serialize};

use super::{dtw_distance, HierarchyError, SubregionGrid};
use crate::gridworld::Point;

/// Largest subregion count solved by exhaustive enumeration in [`SolverMode::Auto`].
pub const EXHAUSTIVE_MAX: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceWeights {
    /// Decay of the cumulative-distance term (1/m).
    pub lambda1: f64,
    /// Decay of the DTW dissimilarity to the previous order (1/m).
    pub lambda2: f64,
    /// Weight of the robot-to-first-subregion leg.
    pub lambda3: f64,
}

impl Default for SequenceWeights {
    fn default() -> Self {
        Self {
            lambda1: 0.15,
            lambda2: 0.05,
            lambda3: 2.0,
        }
    }
}

impl SequenceWeights {
    pub fn is_valid(&self) -> bool {
        [self.lambda1, self.lambda2, self.lambda3]
            .iter()
            .all(|v| *v >= 0.0 && v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverMode {
    /// Exhaustive up to [`EXHAUSTIVE_MAX`] subregions, heuristic above.
    #[default]
    Auto,
    Exhaustive,
    Heuristic,
}

/// An adopted visiting order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SequencePlan {
    /// Subregion indices, first to visit first.
    pub order: Vec<usize>,
    /// Centers of `order`, kept so the next cycle can compare against them.
    pub centers: Vec<Point>,
    pub revenue: f64,
    /// Centers of the order adopted in the previous cycle (empty on the first).
    pub previous_centers: Vec<Point>,
}

/// Revenue of visiting `centers` in order from `robot`:
/// `exp(-l2 * DTW(centers, previous)) * sum_i exp(-l1 * D_i)` where
/// `D_i = l3 * |robot - P_0| + |P_0 - P_1| + ... + |P_{i-1} - P_i|`.
pub fn sequence_revenue(centers: &[Point], robot: Point, previous: &[Point], weights: &SequenceWeights) -> f64 {
    let similarity = (-weights.lambda2 * dtw_distance(centers, previous)).exp();
    let mut cumulative = 0.0;
    let mut sum = 0.0;
    let mut at = robot;
    for (i, &c) in centers.iter().enumerate() {
        let leg = at.distance(c);
        cumulative += if i == 0 { weights.lambda3 * leg } else { leg };
        sum += (-weights.lambda1 * cumulative).exp();
        at = c;
    }
    similarity * sum
}

/// Maps each previously adopted center onto the nearest current subregion
/// center, so the DTW term compares like with like after the bounds grow.
pub fn remap_previous(previous: &[Point], grid: &SubregionGrid) -> Vec<Point> {
    previous
        .iter()
        .filter_map(|p| {
            grid.subregions
                .iter()
                .min_by(|a, b| a.center.distance(*p).total_cmp(&b.center.distance(*p)))
                .map(|s| s.center)
        })
        .collect()
}

/// Orders the frontier-holding subregions of `grid` by maximizing
/// [`sequence_revenue`].
pub fn optimize_sequence(
    grid: &SubregionGrid,
    robot: Point,
    previous_centers: &[Point],
    weights: &SequenceWeights,
    mode: SolverMode,
) -> Result<SequencePlan, HierarchyError> {
    let nodes: Vec<(usize, Point)> = grid.filtered().map(|s| (s.index, s.center)).collect();
    if nodes.is_empty() {
        return Err(HierarchyError::NothingToSequence);
    }
    let previous = remap_previous(previous_centers, grid);
    let (order, revenue) = optimize_order(&nodes, robot, &previous, weights, mode);
    let centers = order
        .iter()
        .map(|&i| grid.subregions[i].center)
        .collect();
    Ok(SequencePlan {
        order,
        centers,
        revenue,
        previous_centers: previous,
    })
}

/// Solves the ordering problem over labelled centers. Returns the labels in
/// visiting order and the achieved revenue. Among equal-revenue orders the
/// exhaustive solver returns the lexicographically smallest label sequence.
pub fn optimize_order(
    nodes: &[(usize, Point)],
    robot: Point,
    previous: &[Point],
    weights: &SequenceWeights,
    mode: SolverMode,
) -> (Vec<usize>, f64) {
    let mut nodes = nodes.to_vec();
    nodes.sort_by_key(|n| n.0);
    let exhaustive = match mode {
        SolverMode::Exhaustive => true,
        SolverMode::Heuristic => false,
        SolverMode::Auto => nodes.len() <= EXHAUSTIVE_MAX,
    };
    let positions = if exhaustive {
        exhaustive_order(&nodes, robot, previous, weights)
    } else {
        heuristic_order(&nodes, robot, previous, weights)
    };
    let centers: Vec<Point> = positions.iter().map(|&k| nodes[k].1).collect();
    let revenue = sequence_revenue(&centers, robot, previous, weights);
    (positions.iter().map(|&k| nodes[k].0).collect(), revenue)
}

struct Evaluator<'a> {
    nodes: &'a [(usize, Point)],
    robot: Point,
    previous: &'a [Point],
    weights: &'a SequenceWeights,
    buffer: Vec<Point>,
}

impl Evaluator<'_> {
    fn revenue(&mut self, perm: &[usize]) -> f64 {
        self.buffer.clear();
        self.buffer.extend(perm.iter().map(|&k| self.nodes[k].1));
        sequence_revenue(&self.buffer, self.robot, self.previous, self.weights)
    }
}

/// Advances `perm` to the next lexicographic permutation; false after the last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("pivot has a successor");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

fn exhaustive_order(nodes: &[(usize, Point)], robot: Point, previous: &[Point], weights: &SequenceWeights) -> Vec<usize> {
    let mut eval = Evaluator {
        nodes,
        robot,
        previous,
        weights,
        buffer: Vec::with_capacity(nodes.len()),
    };
    let mut perm: Vec<usize> = (0..nodes.len()).collect();
    let mut best = perm.clone();
    let mut best_rev = eval.revenue(&perm);
    while next_permutation(&mut perm) {
        let r = eval.revenue(&perm);
        if r > best_rev {
            best_rev = r;
            best.copy_from_slice(&perm);
        }
    }
    best
}

/// Hill climbing from three seeds: nearest insertion, the previous order
/// (extended by best insertion) and a nearest-neighbour chain from the robot.
/// Each seed is improved by first-improvement 2-opt segment reversals and
/// single-node relocations, scanned in a fixed order until no move helps.
/// The best result wins; earlier seeds win ties.
fn heuristic_order(nodes: &[(usize, Point)], robot: Point, previous: &[Point], weights: &SequenceWeights) -> Vec<usize> {
    let n = nodes.len();
    let mut eval = Evaluator {
        nodes,
        robot,
        previous,
        weights,
        buffer: Vec::with_capacity(n),
    };
    let closest = |from: Point, among: &[usize]| -> usize {
        *among
            .iter()
            .min_by(|&&a, &&b| from.distance(nodes[a].1).total_cmp(&from.distance(nodes[b].1)))
            .expect("candidates are non-empty")
    };

    // Nearest insertion: repeatedly take the unplaced node closest to any
    // placed one.
    let all: Vec<usize> = (0..n).collect();
    let mut insertion = vec![closest(robot, &all)];
    let mut remaining: Vec<usize> = all.iter().copied().filter(|&k| k != insertion[0]).collect();
    while !remaining.is_empty() {
        let (slot, _) = remaining
            .iter()
            .enumerate()
            .map(|(slot, &k)| {
                let d = insertion
                    .iter()
                    .map(|&o| nodes[o].1.distance(nodes[k].1))
                    .fold(f64::INFINITY, f64::min);
                (slot, d)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("remaining is non-empty");
        let k = remaining.remove(slot);
        insert_best(&mut eval, &mut insertion, k);
    }

    let mut from_previous: Vec<usize> = Vec::with_capacity(n);
    for &p in previous {
        let free: Vec<usize> = all.iter().copied().filter(|k| !from_previous.contains(k)).collect();
        if free.is_empty() {
            break;
        }
        let k = closest(p, &free);
        if nodes[k].1.distance(p) < 1e-9 {
            from_previous.push(k);
        }
    }
    for k in 0..n {
        if !from_previous.contains(&k) {
            insert_best(&mut eval, &mut from_previous, k);
        }
    }

    let mut chain = Vec::with_capacity(n);
    let mut at = robot;
    let mut left = all.clone();
    while !left.is_empty() {
        let k = closest(at, &left);
        left.retain(|&x| x != k);
        chain.push(k);
        at = nodes[k].1;
    }

    let mut best: Option<(Vec<usize>, f64)> = None;
    for seed in [insertion, from_previous, chain] {
        let (order, r) = climb(&mut eval, seed);
        if best.as_ref().map_or(true, |(_, br)| r > *br) {
            best = Some((order, r));
        }
    }
    best.expect("three seeds").0
}

/// Inserts `k` at the position that maximizes revenue; the earliest such
/// position wins ties.
fn insert_best(eval: &mut Evaluator<'_>, order: &mut Vec<usize>, k: usize) {
    let mut best: Option<(usize, f64)> = None;
    for pos in 0..=order.len() {
        order.insert(pos, k);
        let r = eval.revenue(order);
        order.remove(pos);
        if best.map_or(true, |(_, br)| r > br) {
            best = Some((pos, r));
        }
    }
    order.insert(best.expect("some position").0, k);
}

fn climb(eval: &mut Evaluator<'_>, mut order: Vec<usize>) -> (Vec<usize>, f64) {
    let n = order.len();
    let mut current = eval.revenue(&order);
    'improve: loop {
        for i in 0..n.saturating_sub(1) {
            for j in i + 1..n {
                order[i..=j].reverse();
                let r = eval.revenue(&order);
                if r > current {
                    current = r;
                    continue 'improve;
                }
                order[i..=j].reverse();
            }
        }
        for from in 0..n {
            for to in 0..n {
                if from == to {
                    continue;
                }
                let k = order.remove(from);
                order.insert(to, k);
                let r = eval.revenue(&order);
                if r > current {
                    current = r;
                    continue 'improve;
                }
                order.remove(to);
                order.insert(from, k);
            }
        }
        break;
    }
    (order, current)
}

/// Subregion the robot should work on now: the head of the plan.
pub fn current_subregion(plan: &SequencePlan) -> Option<usize> {
    plan.order.first().copied()
}
