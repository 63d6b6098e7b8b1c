//! Numeric kernels: the level equation `Σ f_k(x) = E`, iterated
//! application, interval location and allocation paths.

use thiserror::Error;

use crate::model::{Allocation, Competition};
use crate::rules::{self, IntervalList, MonotoneFn, ParametricFamily, RuleError, RuleSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("level equation did not converge after {iterations} iterations (residual {residual:e}, tolerance {tolerance:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
}

/// Bisection settings. The residual tolerance is relative: the accepted
/// residual is `residual_tol · max(1, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl SolverConfig {
    pub fn tolerance_for(&self, endowment: f64) -> f64 {
        self.residual_tol * endowment.max(1.0)
    }
}

/// `f` applied `k` times to `x`.
pub fn iterate_f(f: &MonotoneFn, x: f64, k: usize) -> f64 {
    (0..k).fold(x, |v, _| f.eval(v))
}

/// Root of a continuous increasing `g` with `g(lo) <= target <= g(hi)`.
/// Bisects until the bracket stops shrinking in floating point or
/// `max_iter` is spent, then checks the residual.
pub fn bisect(
    g: impl Fn(f64) -> f64,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tolerance: f64,
    max_iter: usize,
) -> Result<f64, SolverError> {
    let mut best = if (g(lo) - target).abs() <= (g(hi) - target).abs() {
        lo
    } else {
        hi
    };
    let mut iterations = 0;
    while iterations < max_iter {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let v = g(mid);
        if (v - target).abs() < (g(best) - target).abs() {
            best = mid;
        }
        if v < target {
            lo = mid;
        } else if v > target {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    let residual = (g(best) - target).abs();
    if residual <= tolerance {
        Ok(best)
    } else {
        Err(SolverError::NoConvergence {
            iterations,
            residual,
            tolerance,
        })
    }
}

/// Solves `Σ_{k<=n} f_k(x) = E` on `[0, E]`.
pub fn solve_level(
    family: &ParametricFamily,
    n: usize,
    e: f64,
    cfg: &SolverConfig,
) -> Result<f64, SolverError> {
    if n == 0 {
        return Err(SolverError::InvalidInput(
            "need at least one competitor".into(),
        ));
    }
    if !(e.is_finite() && e >= 0.0) {
        return Err(SolverError::InvalidInput(format!(
            "endowment must be finite and >= 0, got {e}"
        )));
    }
    if cfg.max_iter == 0 || cfg.residual_tol.is_nan() || cfg.residual_tol <= 0.0 {
        return Err(SolverError::InvalidInput(
            "need residual_tol > 0 and max_iter >= 1".into(),
        ));
    }
    if e == 0.0 {
        return Ok(0.0);
    }
    bisect(
        |x| family.level(x, n),
        e,
        0.0,
        e,
        cfg.tolerance_for(e),
        cfg.max_iter,
    )
}

/// Index of the first interval whose closure contains `avg`.
pub fn interval_locate(intervals: &IntervalList, avg: f64) -> Option<usize> {
    let list = intervals.intervals();
    let k = list.partition_point(|&(_, b)| b < avg);
    list.get(k).filter(|&&(a, _)| a <= avg).map(|_| k)
}

/// Allocations along a ray of endowments.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    pub samples: Vec<(f64, Allocation)>,
}

impl PathTrace {
    pub fn endowments(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(e, _)| *e)
    }
}

/// Default path step, `0.01 · max(1, E_max)`.
pub fn default_step(e_max: f64) -> f64 {
    0.01 * e_max.max(1.0)
}

/// Allocations at `E = 0, step, 2·step, …` up to `E_max` on the canonical
/// `n`-competitor competition. `E_max` itself is always included.
pub fn trace_path(
    rule: &RuleSpec,
    n: usize,
    e_max: f64,
    step: f64,
) -> Result<PathTrace, RuleError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(RuleError::InvalidRuleParams(format!(
            "path step must be > 0, got {step}"
        )));
    }
    if !(e_max.is_finite() && e_max >= 0.0) {
        return Err(RuleError::InvalidRuleParams(format!(
            "path end must be >= 0, got {e_max}"
        )));
    }
    let base = Competition::canonical(n, 0.0)?;
    let mut samples = Vec::new();
    let mut k = 0usize;
    loop {
        let e = k as f64 * step;
        if e > e_max * (1.0 + 1e-12) {
            break;
        }
        let e = e.min(e_max);
        samples.push((e, rules::allocate(rule, &base.with_endowment(e)?)?));
        k += 1;
    }
    if samples.last().is_none_or(|(e, _)| *e < e_max) {
        samples.push((e_max, rules::allocate(rule, &base.with_endowment(e_max)?)?));
    }
    Ok(PathTrace { samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterate_examples() {
        assert!((iterate_f(&MonotoneFn::Shift(1.0), 8.0 / 3.0, 2) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(iterate_f(&MonotoneFn::Cap(0.1), 3.5, 0), 3.5);
        assert_eq!(iterate_f(&MonotoneFn::Linear(0.5), 4.0, 2), 1.0);
    }

    #[test]
    fn level_examples() {
        let cfg = SolverConfig::default();
        let id = ParametricFamily::Listed(vec![MonotoneFn::Identity]);
        assert!((solve_level(&id, 1, 5.0, &cfg).unwrap() - 5.0).abs() < 1e-9);
        let arith = ParametricFamily::Iterates(MonotoneFn::Shift(1.0));
        assert!((solve_level(&arith, 3, 5.0, &cfg).unwrap() - 8.0 / 3.0).abs() < 1e-9);
        let lin = ParametricFamily::Iterates(MonotoneFn::Linear(0.5));
        assert!((solve_level(&lin, 3, 7.0, &cfg).unwrap() - 4.0).abs() < 1e-9);
        assert_eq!(solve_level(&lin, 3, 0.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn level_residual_contract() {
        let cfg = SolverConfig::default();
        let fam = ParametricFamily::Hyperarithmetic;
        for e in [0.1, 1.0, 3.3, 17.0, 1e6] {
            let x = solve_level(&fam, 5, e, &cfg).unwrap();
            assert!((fam.level(x, 5) - e).abs() <= cfg.tolerance_for(e));
        }
    }

    #[test]
    fn starved_solver_reports_failure() {
        let cfg = SolverConfig {
            residual_tol: 1e-10,
            max_iter: 2,
        };
        let fam = ParametricFamily::Iterates(MonotoneFn::Shift(1.0));
        assert!(matches!(
            solve_level(&fam, 3, 5.0, &cfg),
            Err(SolverError::NoConvergence { .. })
        ));
    }

    #[test]
    fn locate_examples() {
        let unbounded = IntervalList::new(vec![(0.0, f64::INFINITY)]).unwrap();
        assert_eq!(interval_locate(&unbounded, 3.0), Some(0));
        let path = IntervalList::new(vec![(1.0, 2.5), (2.5, 3.0), (3.5, f64::INFINITY)]).unwrap();
        assert_eq!(interval_locate(&path, 3.2), None);
        assert_eq!(interval_locate(&path, 0.5), None);
        assert_eq!(interval_locate(&path, 2.5), Some(0));
        assert_eq!(interval_locate(&IntervalList::unit_steps(5), 1.5), Some(1));
        assert_eq!(interval_locate(&IntervalList::empty(), 1.0), None);
    }

    #[test]
    fn trace_examples() {
        let t = trace_path(&RuleSpec::Ed, 2, 1.0, 0.5).unwrap();
        let got: Vec<(f64, Vec<f64>)> = t
            .samples
            .iter()
            .map(|(e, a)| (*e, a.by_position()))
            .collect();
        assert_eq!(
            got,
            vec![
                (0.0, vec![0.0, 0.0]),
                (0.5, vec![0.25, 0.25]),
                (1.0, vec![0.5, 0.5])
            ]
        );

        let t = trace_path(&RuleSpec::unit_step(), 2, 3.0, 0.5).unwrap();
        let (e, a) = t.samples.last().unwrap();
        assert_eq!(*e, 3.0);
        assert_eq!(a.by_position(), vec![2.0, 1.0]);

        let t = trace_path(&RuleSpec::geometric(0.713).unwrap(), 2, 5.0, 1.0).unwrap();
        let p = t.samples.last().unwrap().1.by_position();
        assert!((p[0] - 5.0 / 1.713).abs() < 1e-9 && (p[1] - 5.0 * 0.713 / 1.713).abs() < 1e-9);
    }

    #[test]
    fn trace_includes_endpoint_off_grid() {
        let t = trace_path(&RuleSpec::Wta, 3, 1.0, 0.3).unwrap();
        let es: Vec<f64> = t.endowments().collect();
        assert_eq!(es.len(), 5);
        assert_eq!(*es.last().unwrap(), 1.0);
        assert!(es.windows(2).all(|w| w[1] > w[0]));
    }
}
