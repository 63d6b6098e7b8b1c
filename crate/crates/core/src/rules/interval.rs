//! Interval rules: equal division except on designated average-prize
//! intervals `(a_k, b_k)`, inside which the top positions climb from `a_k`
//! to `b_k` one at a time.

use super::RuleError;
use crate::solver::interval_locate;

/// Finite, sorted, pairwise-disjoint list of open intervals `(a_k, b_k)`.
/// Only the last upper bound may be `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalList {
    intervals: Vec<(f64, f64)>,
}

impl IntervalList {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self, RuleError> {
        let bad = |msg: String| Err(RuleError::InvalidRuleParams(msg));
        for (k, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && a >= 0.0) {
                return bad(format!(
                    "interval {}: lower bound must be finite and >= 0",
                    k + 1
                ));
            }
            if b.is_nan() || b <= a {
                return bad(format!("interval {}: need a < b", k + 1));
            }
            if b.is_infinite() && k + 1 != intervals.len() {
                return bad("only the last interval may be unbounded".into());
            }
        }
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 {
                return bad("intervals must be sorted and pairwise disjoint".into());
            }
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
        }
    }

    /// `(k−1, k)` for `k = 1..=count`.
    pub fn unit_steps(count: usize) -> Self {
        Self {
            intervals: (1..=count).map(|k| ((k - 1) as f64, k as f64)).collect(),
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// `k · b` with `0 · ∞ = 0`.
fn times(k: usize, b: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * b
    }
}

/// Prize of position `r` (1-based) among `n` under the interval formula.
/// Clauses are tried in order; at shared boundaries they agree.
pub(crate) fn interval_prize(a: f64, b: f64, n: usize, r: usize, endowment: f64) -> f64 {
    let e = endowment;
    let lower = times(n - r + 1, a) + times(r - 1, b);
    let upper = times(n - r, a) + times(r, b);
    if times(n, a) <= e && e <= lower {
        a
    } else if lower <= e && e <= upper {
        e - times(n - r, a) - times(r - 1, b)
    } else if upper <= e && e <= times(n, b) {
        b
    } else {
        e / n as f64
    }
}

/// Prizes by position for `n` competitors and endowment `e`.
pub fn interval_prizes(intervals: &IntervalList, n: usize, e: f64) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let avg = e / n as f64;
    match interval_locate(intervals, avg) {
        Some(k) => {
            let (a, b) = intervals.intervals[k];
            (1..=n).map(|r| interval_prize(a, b, n, r, e)).collect()
        }
        None => vec![avg; n],
    }
}
