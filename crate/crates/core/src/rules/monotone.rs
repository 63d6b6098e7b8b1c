//! Continuous non-decreasing functions `f` with `0 <= f(x) <= x`, and the
//! sequences built from them that drive single-parametric and parametric
//! rules.
//!
//! Every function here is piecewise linear with finitely many kinks, so the
//! pointwise comparisons needed for validation are exact: two such functions
//! are compared at the union of their kinks plus their slopes past the last
//! kink.

use super::RuleError;

#[derive(Debug, Clone, PartialEq)]
pub enum MonotoneFn {
    Identity,
    Zero,
    /// `λ·x` with `λ ∈ [0, 1]`.
    Linear(f64),
    /// `max{0, x − c}`.
    Shift(f64),
    /// `min{a, x}`; `a = ∞` is the identity.
    Cap(f64),
    Piecewise(PiecewiseLinear),
}

/// Linear interpolation through `(0, 0)` and the given breakpoints, extended
/// past the last breakpoint with the slope of the last segment.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self, RuleError> {
        let bad =
            |msg: &str| RuleError::InvalidRuleParams(format!("piecewise-linear function: {msg}"));
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(bad("breakpoints must be finite"));
        }
        if points.first().is_some_and(|&(x, _)| x == 0.0) {
            if points[0].1 != 0.0 {
                return Err(bad("f(0) must be 0"));
            }
        } else {
            points.insert(0, (0.0, 0.0));
        }
        if points.len() < 2 {
            return Err(bad("need at least one breakpoint with x > 0"));
        }
        for w in points.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x1 <= x0 {
                return Err(bad("breakpoint x values must be strictly increasing"));
            }
            if y1 < y0 {
                return Err(bad("function must be non-decreasing"));
            }
        }
        if points.iter().any(|&(x, y)| y < 0.0 || y > x) {
            return Err(bad("need 0 <= f(x) <= x at every breakpoint"));
        }
        let pwl = Self { points };
        if pwl.tail_slope() > 1.0 {
            return Err(bad("slope past the last breakpoint must be at most 1"));
        }
        Ok(pwl)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn tail_slope(&self) -> f64 {
        let n = self.points.len();
        let ((x0, y0), (x1, y1)) = (self.points[n - 2], self.points[n - 1]);
        (y1 - y0) / (x1 - x0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.points.partition_point(|&(px, _)| px <= x);
        let seg = idx.clamp(1, self.points.len() - 1);
        let ((x0, y0), (x1, y1)) = (self.points[seg - 1], self.points[seg]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

impl MonotoneFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            MonotoneFn::Identity => x,
            MonotoneFn::Zero => 0.0,
            MonotoneFn::Linear(l) => l * x,
            MonotoneFn::Shift(c) => (x - c).max(0.0),
            MonotoneFn::Cap(a) => x.min(*a),
            MonotoneFn::Piecewise(p) => p.eval(x),
        }
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        let bad = |msg: String| Err(RuleError::InvalidRuleParams(msg));
        match *self {
            MonotoneFn::Linear(l) if !(0.0..=1.0).contains(&l) => {
                bad(format!("linear slope must lie in [0, 1], got {l}"))
            }
            MonotoneFn::Shift(c) if !(c.is_finite() && c >= 0.0) => {
                bad(format!("shift must be finite and non-negative, got {c}"))
            }
            MonotoneFn::Cap(a) if a.is_nan() || a < 0.0 => {
                bad(format!("cap must be non-negative, got {a}"))
            }
            _ => Ok(()),
        }
    }

    /// Interior kinks (finite, positive).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            MonotoneFn::Shift(c) if *c > 0.0 => vec![*c],
            MonotoneFn::Cap(a) if a.is_finite() && *a > 0.0 => vec![*a],
            MonotoneFn::Piecewise(p) => p.points.iter().skip(1).map(|&(x, _)| x).collect(),
            _ => Vec::new(),
        }
    }

    /// Slope beyond every breakpoint.
    pub fn tail_slope(&self) -> f64 {
        match self {
            MonotoneFn::Identity | MonotoneFn::Shift(_) => 1.0,
            MonotoneFn::Zero => 0.0,
            MonotoneFn::Linear(l) => *l,
            MonotoneFn::Cap(a) => {
                if a.is_finite() {
                    0.0
                } else {
                    1.0
                }
            }
            MonotoneFn::Piecewise(p) => p.tail_slope(),
        }
    }

    /// True iff `self(x) >= other(x) - tol` for every `x >= 0`.
    pub fn dominates(&self, other: &MonotoneFn, tol: f64) -> bool {
        let mut xs: Vec<f64> = self.breakpoints();
        xs.extend(other.breakpoints());
        xs.push(0.0);
        xs.push(1.0);
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.iter().all(|&x| self.eval(x) >= other.eval(x) - tol)
            && self.tail_slope() >= other.tail_slope() - tol
    }

    pub fn is_identity(&self) -> bool {
        self.dominates(&MonotoneFn::Identity, 0.0) && MonotoneFn::Identity.dominates(self, 0.0)
    }
}

/// The prize-per-position functions `f_1 = id, f_2, f_3, …` of a parametric
/// rule.
#[derive(Debug, Clone, PartialEq)]
pub enum ParametricFamily {
    /// Explicit finite list; competitions longer than the list are rejected.
    Listed(Vec<MonotoneFn>),
    /// `f_1(x) = x`, `f_k(x) = max{0, x − k}` for `k >= 2`.
    Hyperarithmetic,
    /// `f_k = f^(k−1)`, the single-parametric case.
    Iterates(MonotoneFn),
}

impl ParametricFamily {
    pub fn validate(&self) -> Result<(), RuleError> {
        match self {
            ParametricFamily::Listed(fs) => {
                let first = fs.first().ok_or_else(|| {
                    RuleError::InvalidRuleParams("parametric rule needs at least f_1".into())
                })?;
                for f in fs {
                    f.validate()?;
                    if !MonotoneFn::Identity.dominates(f, 0.0) {
                        return Err(RuleError::InvalidRuleParams(
                            "every f_k must satisfy f_k(x) <= x".into(),
                        ));
                    }
                }
                if !first.is_identity() {
                    return Err(RuleError::InvalidRuleParams(
                        "f_1 must be the identity".into(),
                    ));
                }
                for (k, w) in fs.windows(2).enumerate() {
                    if !w[0].dominates(&w[1], 0.0) {
                        return Err(RuleError::InvalidRuleParams(format!(
                            "f_{} must not exceed f_{} pointwise",
                            k + 2,
                            k + 1
                        )));
                    }
                }
                Ok(())
            }
            ParametricFamily::Hyperarithmetic => Ok(()),
            ParametricFamily::Iterates(f) => {
                f.validate()?;
                if !MonotoneFn::Identity.dominates(f, 0.0) {
                    return Err(RuleError::InvalidRuleParams("f(x) <= x must hold".into()));
                }
                Ok(())
            }
        }
    }

    /// Number of positions the family can serve, `None` when unbounded.
    pub fn max_positions(&self) -> Option<usize> {
        match self {
            ParametricFamily::Listed(fs) => Some(fs.len()),
            _ => None,
        }
    }

    /// `(f_1(x), …, f_n(x))`.
    pub fn prizes(&self, x: f64, n: usize) -> Vec<f64> {
        match self {
            ParametricFamily::Listed(fs) => fs.iter().take(n).map(|f| f.eval(x)).collect(),
            ParametricFamily::Hyperarithmetic => (1..=n)
                .map(|k| if k == 1 { x } else { (x - k as f64).max(0.0) })
                .collect(),
            ParametricFamily::Iterates(f) => {
                let mut out = Vec::with_capacity(n);
                let mut v = x;
                for _ in 0..n {
                    out.push(v);
                    v = f.eval(v);
                }
                out
            }
        }
    }

    /// `Σ_{k<=n} f_k(x)`.
    pub fn level(&self, x: f64, n: usize) -> f64 {
        match self {
            ParametricFamily::Iterates(f) => {
                let mut sum = 0.0;
                let mut v = x;
                for _ in 0..n {
                    sum += v;
                    v = f.eval(v);
                }
                sum
            }
            _ => self.prizes(x, n).iter().sum(),
        }
    }
}
