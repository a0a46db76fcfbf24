use crate::gridworld::Point;

/// Dynamic time warping distance between two point sequences with Euclidean
/// point cost and an unconstrained warping window. Returns 0 when either
/// sequence is empty.
pub fn dtw_distance(a: &[Point], b: &[Point]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let m = b.len();
    // Two rolling rows of the accumulated-cost table.
    let mut prev = vec![f64::INFINITY; m];
    let mut cur = vec![0.0; m];
    for (i, pa) in a.iter().enumerate() {
        for (j, pb) in b.iter().enumerate() {
            let cost = pa.distance(*pb);
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(cur[j - 1]).min(prev[j - 1]),
            };
            cur[j] = cost + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn identity_is_zero() {
        let a = pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(dtw_distance(&a, &a), 0.0);
    }

    #[test]
    fn single_pair_is_euclidean() {
        assert_eq!(dtw_distance(&pts(&[(0.0, 0.0)]), &pts(&[(3.0, 4.0)])), 5.0);
    }

    /// Hand-run table, rows a = [(0,0),(1,0)], columns b = [(0,1),(1,1),(2,1)]:
    ///
    /// ```text
    ///        b0        b1          b2
    /// a0     1         1+r2        1+r2+r5
    /// a1     1+r2      1+1 = 2     r2 + min(1+r2+r5, 2, 1+r2) = 2+r2
    /// ```
    #[test]
    fn two_by_three_table() {
        let a = pts(&[(0.0, 0.0), (1.0, 0.0)]);
        let b = pts(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]);
        let expected = 2.0 + 2f64.sqrt();
        assert!((dtw_distance(&a, &b) - expected).abs() < 1e-12);
        assert!((dtw_distance(&b, &a) - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_sequence_is_zero() {
        assert_eq!(dtw_distance(&[], &pts(&[(1.0, 1.0)])), 0.0);
        assert_eq!(dtw_distance(&pts(&[(1.0, 1.0)]), &[]), 0.0);
    }
}
