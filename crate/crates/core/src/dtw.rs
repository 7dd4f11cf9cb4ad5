//! Dynamic time warping between frame matrices.
//!
//! Local cost is the Euclidean distance between frames; steps are `(1,0)`,
//! `(0,1)` and `(1,1)` with no band or slope constraint. The reported distance
//! is the total path cost divided by the number of path steps, i.e. the mean
//! local cost along the optimal path.

use crate::error::{Error, Result};
use crate::signal::FrameMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentStep {
    /// Frame index into the first sequence.
    pub i: usize,
    /// Frame index into the second sequence.
    pub j: usize,
    pub local_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentTrace {
    pub steps: Vec<AlignmentStep>,
    pub total_cost: f64,
    pub normalized_cost: f64,
}

pub fn euclidean(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy)]
enum Move {
    Start,
    Diagonal,
    /// Advance in the first sequence only.
    Down,
    /// Advance in the second sequence only.
    Right,
}

/// Minimal-cost monotone alignment of `a` onto `b`.
///
/// Ties in the traceback prefer the diagonal, then `(1,0)`, then `(0,1)`.
pub fn dtw_distance(a: &FrameMatrix, b: &FrameMatrix) -> Result<AlignmentTrace> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    let (n, m) = (a.frames(), b.frames());
    if n == 0 || m == 0 {
        return Err(Error::EmptyInput);
    }

    let mut local = vec![0.0; n * m];
    for (i, ra) in a.rows().enumerate() {
        for (j, rb) in b.rows().enumerate() {
            local[i * m + j] = euclidean(ra, rb);
        }
    }

    let mut acc = vec![0.0; n * m];
    let mut moves = vec![Move::Start; n * m];
    for i in 0..n {
        for j in 0..m {
            let idx = i * m + j;
            let c = local[idx];
            let (best, mv) = match (i, j) {
                (0, 0) => (0.0, Move::Start),
                (0, _) => (acc[idx - 1], Move::Right),
                (_, 0) => (acc[idx - m], Move::Down),
                _ => {
                    let diag = acc[idx - m - 1];
                    let down = acc[idx - m];
                    let right = acc[idx - 1];
                    if diag <= down && diag <= right {
                        (diag, Move::Diagonal)
                    } else if down <= right {
                        (down, Move::Down)
                    } else {
                        (right, Move::Right)
                    }
                }
            };
            acc[idx] = if i == 0 && j == 0 { c } else { best + c };
            moves[idx] = mv;
        }
    }

    let mut steps = Vec::with_capacity(n + m);
    let (mut i, mut j) = (n - 1, m - 1);
    loop {
        let idx = i * m + j;
        steps.push(AlignmentStep {
            i,
            j,
            local_cost: local[idx],
        });
        match moves[idx] {
            Move::Start => break,
            Move::Diagonal => {
                i -= 1;
                j -= 1;
            }
            Move::Down => i -= 1,
            Move::Right => j -= 1,
        }
    }
    steps.reverse();
    let total_cost = acc[n * m - 1];
    Ok(AlignmentTrace {
        normalized_cost: total_cost / steps.len() as f64,
        total_cost,
        steps,
    })
}

/// Per-frame view of an alignment along the first sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameProfile {
    /// Mean local cost of the path steps touching each frame of the first sequence.
    pub frame_costs: Vec<f64>,
    /// Number of frames of the second sequence aligned to each frame.
    pub multiplicity: Vec<usize>,
    /// Centred moving average of `frame_costs`; element `k` covers frames
    /// `k..k + window` and is centred on frame `k + window / 2`.
    pub moving_average: Vec<f64>,
    pub window: usize,
    /// The alignment's normalized cost.
    pub global: f64,
}

impl FrameProfile {
    /// Frame index on which moving-average element `k` is centred.
    pub fn moving_average_centre(&self, k: usize) -> usize {
        k + self.window / 2
    }
}

pub fn frame_profile(trace: &AlignmentTrace, window: usize) -> Result<FrameProfile> {
    let len = trace.steps.last().map_or(0, |s| s.i + 1);
    if window == 0 || window.is_multiple_of(2) || window > len {
        return Err(Error::BadWindow { window, len });
    }
    let mut sums = vec![0.0; len];
    let mut multiplicity = vec![0usize; len];
    for s in &trace.steps {
        sums[s.i] += s.local_cost;
        multiplicity[s.i] += 1;
    }
    let frame_costs: Vec<f64> = sums
        .iter()
        .zip(&multiplicity)
        .map(|(s, &k)| s / k as f64)
        .collect();
    let moving_average = frame_costs
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect();
    Ok(FrameProfile {
        frame_costs,
        multiplicity,
        moving_average,
        window,
        global: trace.normalized_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fm(rows: &[&[f32]]) -> FrameMatrix {
        FrameMatrix::from_rows(rows, 10.0, 25.0, "t").unwrap()
    }

    fn matrix(dim: usize, values: Vec<f32>) -> FrameMatrix {
        FrameMatrix::new(values, dim, 20.0, 0.0, "t").unwrap()
    }

    /// Exhaustive minimum over all monotone paths, summing costs forward.
    fn brute_force(a: &FrameMatrix, b: &FrameMatrix) -> (f64, usize) {
        fn walk(a: &FrameMatrix, b: &FrameMatrix, i: usize, j: usize, acc: f64, len: usize, best: &mut (f64, usize)) {
            let acc = if i == 0 && j == 0 { euclidean(a.row(0), b.row(0)) } else { acc + euclidean(a.row(i), b.row(j)) };
            let len = len + 1;
            if i == a.frames() - 1 && j == b.frames() - 1 {
                if acc < best.0 {
                    *best = (acc, len);
                }
                return;
            }
            if i + 1 < a.frames() && j + 1 < b.frames() {
                walk(a, b, i + 1, j + 1, acc, len, best);
            }
            if i + 1 < a.frames() {
                walk(a, b, i + 1, j, acc, len, best);
            }
            if j + 1 < b.frames() {
                walk(a, b, i, j + 1, acc, len, best);
            }
        }
        let mut best = (f64::INFINITY, 0);
        walk(a, b, 0, 0, 0.0, 0, &mut best);
        best
    }

    #[test]
    fn two_frames_onto_one() {
        let t = dtw_distance(&fm(&[&[0.0], &[2.0]]), &fm(&[&[1.0]])).unwrap();
        assert_eq!(t.total_cost, 2.0);
        assert_eq!(t.normalized_cost, 1.0);
        assert_eq!(t.steps.len(), 2);
        assert_eq!((t.steps[1].i, t.steps[1].j), (1, 0));
    }

    #[test]
    fn self_distance_is_zero() {
        let x = fm(&[&[0.1, 2.0], &[3.0, -1.0], &[0.5, 0.5]]);
        let t = dtw_distance(&x, &x).unwrap();
        assert_eq!(t.normalized_cost, 0.0);
        assert!(t.steps.iter().all(|s| s.i == s.j));
    }

    #[test]
    fn dimension_mismatch() {
        let a = matrix(39, vec![0.0; 39]);
        let b = matrix(1024, vec![0.0; 1024]);
        assert!(matches!(dtw_distance(&a, &b), Err(Error::DimMismatch(39, 1024))));
    }

    #[test]
    fn profile_of_constant_costs() {
        let a = matrix(1, vec![0.0; 12]);
        let b = matrix(1, vec![1.5; 12]);
        let t = dtw_distance(&a, &b).unwrap();
        let p = frame_profile(&t, 5).unwrap();
        assert!(p.moving_average.iter().all(|&v| v == 1.5));
        assert_eq!(p.global, 1.5);
        assert_eq!(p.moving_average.len(), 8);
    }

    #[test]
    fn profile_window_nine_on_forty_frames() {
        let a = matrix(1, (0..40).map(|v| v as f32).collect());
        let t = dtw_distance(&a, &a).unwrap();
        assert_eq!(t.steps.len(), 40);
        let p = frame_profile(&t, 9).unwrap();
        assert_eq!(p.moving_average.len(), 32);
        assert_eq!(p.moving_average_centre(0), 4);
        assert!(matches!(frame_profile(&t, 10), Err(Error::BadWindow { window: 10, .. })));
        assert!(matches!(frame_profile(&t, 41), Err(Error::BadWindow { .. })));
        assert!(matches!(frame_profile(&t, 0), Err(Error::BadWindow { .. })));
    }

    #[test]
    fn multiplicity_counts_frames_of_second_sequence() {
        let a = fm(&[&[0.0], &[5.0]]);
        let b = fm(&[&[0.0], &[0.1], &[0.2], &[5.0]]);
        let t = dtw_distance(&a, &b).unwrap();
        let p = frame_profile(&t, 1).unwrap();
        assert_eq!(p.multiplicity, vec![3, 1]);
        assert!((p.frame_costs[0] - 0.1).abs() < 1e-6);
    }

    fn arb_pair() -> impl Strategy<Value = (FrameMatrix, FrameMatrix)> {
        (1usize..=3, 1usize..=5, 1usize..=5).prop_flat_map(|(d, ta, tb)| {
            (
                prop::collection::vec(-10.0f32..10.0, d * ta),
                prop::collection::vec(-10.0f32..10.0, d * tb),
            )
                .prop_map(move |(x, y)| (matrix(d, x), matrix(d, y)))
        })
    }

    proptest! {
        #[test]
        fn matches_exhaustive_search((a, b) in arb_pair()) {
            let t = dtw_distance(&a, &b).unwrap();
            let (total, len) = brute_force(&a, &b);
            prop_assert!((t.total_cost - total).abs() <= 1e-12);
            prop_assert!((t.normalized_cost - total / len as f64).abs() <= 1e-12);
        }

        #[test]
        fn trace_is_a_valid_path((a, b) in arb_pair()) {
            let t = dtw_distance(&a, &b).unwrap();
            let first = t.steps[0];
            let last = *t.steps.last().unwrap();
            prop_assert_eq!((first.i, first.j), (0, 0));
            prop_assert_eq!((last.i, last.j), (a.frames() - 1, b.frames() - 1));
            for w in t.steps.windows(2) {
                let step = (w[1].i - w[0].i, w[1].j - w[0].j);
                prop_assert!(matches!(step, (1, 0) | (0, 1) | (1, 1)));
            }
            let sum: f64 = t.steps.iter().map(|s| s.local_cost).sum();
            prop_assert!((sum - t.total_cost).abs() < 1e-9);
            prop_assert_eq!(t.normalized_cost, t.total_cost / t.steps.len() as f64);
        }

        #[test]
        fn symmetric((a, b) in arb_pair()) {
            let ab = dtw_distance(&a, &b).unwrap();
            let ba = dtw_distance(&b, &a).unwrap();
            prop_assert_eq!(ab.total_cost, ba.total_cost);
            prop_assert!((ab.normalized_cost - ba.normalized_cost).abs() < 1e-12);
        }

        #[test]
        fn scaling_features_scales_distance((a, b) in arb_pair(), s in 0.25f32..4.0) {
            let scale = |m: &FrameMatrix| matrix(m.dim(), m.as_slice().iter().map(|v| v * s).collect());
            let base = dtw_distance(&a, &b).unwrap().normalized_cost;
            let scaled = dtw_distance(&scale(&a), &scale(&b)).unwrap().normalized_cost;
            prop_assert!((scaled - s as f64 * base).abs() <= 1e-4 * (1.0 + base * s as f64));
        }
    }
}
