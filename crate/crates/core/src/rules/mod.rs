//! Prize allocation rules.
//!
//! Every family is reachable through [`allocate`]; the per-family functions
//! are public as well. Family rules depend only on positions, so they are
//! computed as a prize vector by position and then attached to the ranking.

pub mod counterexample;
pub mod interval;
pub mod monotone;

use std::fmt;

use thiserror::Error;

pub use counterexample::CounterexampleRule;
pub use interval::IntervalList;
pub use monotone::{MonotoneFn, ParametricFamily, PiecewiseLinear};

use crate::model::{Allocation, Competition, ModelError};
use crate::solver::{self, SolverConfig, SolverError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("invalid rule parameters: {0}")]
    InvalidRuleParams(String),
    #[error(transparent)]
    SolverFailure(#[from] SolverError),
    #[error("unknown counterexample rule `{0}`")]
    UnknownCounterexample(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Description of one allocation rule.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleSpec {
    Ed,
    Wta,
    /// Winner-takes-surplus with cap `a` (`∞` allowed).
    Wts(f64),
    Interval(IntervalList),
    SingleParametric(MonotoneFn),
    Parametric(ParametricFamily),
    /// `allow_increasing` admits `λ > 1`; such rules break order
    /// preservation and exist only to test the falsifiers.
    Geometric {
        lambda: f64,
        allow_increasing: bool,
    },
    Proportional(Vec<f64>),
    Counterexample(CounterexampleRule),
}

impl RuleSpec {
    pub fn geometric(lambda: f64) -> Result<Self, RuleError> {
        let rule = RuleSpec::Geometric {
            lambda,
            allow_increasing: false,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn geometric_unchecked(lambda: f64) -> Self {
        RuleSpec::Geometric {
            lambda,
            allow_increasing: true,
        }
    }

    pub fn proportional(weights: Vec<f64>) -> Result<Self, RuleError> {
        let rule = RuleSpec::Proportional(weights);
        rule.validate()?;
        Ok(rule)
    }

    /// The rule `(k−1, k)`, `k = 1, 2, …`, truncated at `k = 1000`.
    pub fn unit_step() -> Self {
        RuleSpec::Interval(IntervalList::unit_steps(UNIT_STEP_INTERVALS))
    }

    /// Single-parametric rule with `f(x) = max{0, x − 1}`.
    pub fn arithmetic() -> Self {
        RuleSpec::SingleParametric(MonotoneFn::Shift(1.0))
    }

    pub fn hyperarithmetic() -> Self {
        RuleSpec::Parametric(ParametricFamily::Hyperarithmetic)
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        let bad = |msg: String| Err(RuleError::InvalidRuleParams(msg));
        match self {
            RuleSpec::Wts(a) if a.is_nan() || *a < 0.0 => {
                bad(format!("WTS cap must be >= 0, got {a}"))
            }
            RuleSpec::SingleParametric(f) => ParametricFamily::Iterates(f.clone()).validate(),
            RuleSpec::Parametric(fam) => fam.validate(),
            RuleSpec::Geometric {
                lambda,
                allow_increasing,
            } => {
                if !(lambda.is_finite() && *lambda >= 0.0) {
                    bad(format!(
                        "geometric ratio must be finite and >= 0, got {lambda}"
                    ))
                } else if *lambda > 1.0 && !allow_increasing {
                    bad(format!("geometric ratio must lie in [0, 1], got {lambda}"))
                } else {
                    Ok(())
                }
            }
            RuleSpec::Proportional(w) => {
                if w.first().is_none_or(|&w1| !(w1.is_finite() && w1 > 0.0)) {
                    return bad("proportional weights need λ_1 > 0".into());
                }
                if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return bad("proportional weights must be finite and >= 0".into());
                }
                if w.windows(2).any(|p| p[1] > p[0]) {
                    return bad("proportional weights must be non-increasing".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether the rule is a member of one of the fair families, i.e. the
    /// allocation depends only on positions and never favours a lower one.
    pub fn is_family_rule(&self) -> bool {
        match self {
            RuleSpec::Counterexample(_) => false,
            RuleSpec::Geometric { lambda, .. } => *lambda <= 1.0,
            _ => true,
        }
    }
}

const UNIT_STEP_INTERVALS: usize = 1000;

/// Allocates with the default solver configuration.
pub fn allocate(rule: &RuleSpec, competition: &Competition) -> Result<Allocation, RuleError> {
    allocate_with(rule, competition, &SolverConfig::default())
}

pub fn allocate_with(
    rule: &RuleSpec,
    competition: &Competition,
    cfg: &SolverConfig,
) -> Result<Allocation, RuleError> {
    if let RuleSpec::Counterexample(cx) = rule {
        return cx.allocate(competition);
    }
    let prizes = prizes_by_position(rule, competition.size(), competition.endowment(), cfg)?;
    Ok(Allocation::from_positions(competition.ranking(), prizes)?)
}

/// Prize vector by position for an anonymous rule.
///
/// Counterexample rules are evaluated on the canonical competition
/// `c1 > … > cn`.
pub fn prizes_by_position(
    rule: &RuleSpec,
    n: usize,
    e: f64,
    cfg: &SolverConfig,
) -> Result<Vec<f64>, RuleError> {
    rule.validate()?;
    if !(e.is_finite() && e >= 0.0) {
        return Err(ModelError::NegativeEndowment(e).into());
    }
    Ok(match rule {
        RuleSpec::Ed => ed_prizes(n, e),
        RuleSpec::Wta => wta_prizes(n, e),
        RuleSpec::Wts(a) => wts_prizes(*a, n, e),
        RuleSpec::Interval(list) => interval::interval_prizes(list, n, e),
        RuleSpec::SingleParametric(f) => {
            parametric_prizes(&ParametricFamily::Iterates(f.clone()), n, e, cfg)?
        }
        RuleSpec::Parametric(fam) => parametric_prizes(fam, n, e, cfg)?,
        RuleSpec::Geometric { lambda, .. } => geometric_prizes(*lambda, n, e),
        RuleSpec::Proportional(w) => proportional_prizes(w, n, e)?,
        RuleSpec::Counterexample(cx) => cx.allocate(&Competition::canonical(n, e)?)?.by_position(),
    })
}

fn ed_prizes(n: usize, e: f64) -> Vec<f64> {
    vec![e / n as f64; n]
}

fn wta_prizes(n: usize, e: f64) -> Vec<f64> {
    let mut p = vec![0.0; n];
    if n > 0 {
        p[0] = e;
    }
    p
}

fn wts_prizes(a: f64, n: usize, e: f64) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    if a.is_finite() && e >= n as f64 * a {
        let mut p = vec![a; n];
        p[0] = e - (n - 1) as f64 * a;
        p
    } else {
        ed_prizes(n, e)
    }
}

fn geometric_prizes(lambda: f64, n: usize, e: f64) -> Vec<f64> {
    let weights: Vec<f64> = (0..n).map(|k| lambda.powi(k as i32)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total * e).collect()
}

fn proportional_prizes(weights: &[f64], n: usize, e: f64) -> Result<Vec<f64>, RuleError> {
    if weights.len() < n {
        return Err(RuleError::InvalidRuleParams(format!(
            "proportional rule lists {} weights but the competition has {n} competitors",
            weights.len()
        )));
    }
    let total: f64 = weights[..n].iter().sum();
    Ok(weights[..n].iter().map(|w| w / total * e).collect())
}

fn parametric_prizes(
    fam: &ParametricFamily,
    n: usize,
    e: f64,
    cfg: &SolverConfig,
) -> Result<Vec<f64>, RuleError> {
    if let Some(max) = fam.max_positions() {
        if max < n {
            return Err(RuleError::InvalidRuleParams(format!(
                "parametric rule defines {max} functions but the competition has {n} competitors"
            )));
        }
    }
    let x = solver::solve_level(fam, n, e, cfg)?;
    Ok(fam.prizes(x, n))
}

fn attach(competition: &Competition, prizes: Vec<f64>) -> Allocation {
    Allocation::from_positions(competition.ranking(), prizes)
        .expect("prize vector sized by the competition")
}

pub fn allocate_ed(competition: &Competition) -> Allocation {
    attach(
        competition,
        ed_prizes(competition.size(), competition.endowment()),
    )
}

pub fn allocate_wta(competition: &Competition) -> Allocation {
    attach(
        competition,
        wta_prizes(competition.size(), competition.endowment()),
    )
}

pub fn allocate_wts(a: f64, competition: &Competition) -> Result<Allocation, RuleError> {
    RuleSpec::Wts(a).validate()?;
    Ok(attach(
        competition,
        wts_prizes(a, competition.size(), competition.endowment()),
    ))
}

pub fn allocate_interval(intervals: &IntervalList, competition: &Competition) -> Allocation {
    attach(
        competition,
        interval::interval_prizes(intervals, competition.size(), competition.endowment()),
    )
}

pub fn allocate_single_parametric(
    f: &MonotoneFn,
    competition: &Competition,
) -> Result<Allocation, RuleError> {
    allocate(&RuleSpec::SingleParametric(f.clone()), competition)
}

pub fn allocate_parametric(
    fam: &ParametricFamily,
    competition: &Competition,
) -> Result<Allocation, RuleError> {
    allocate(&RuleSpec::Parametric(fam.clone()), competition)
}

pub fn allocate_geometric(lambda: f64, competition: &Competition) -> Result<Allocation, RuleError> {
    allocate(&RuleSpec::geometric(lambda)?, competition)
}

pub fn allocate_proportional(
    weights: &[f64],
    competition: &Competition,
) -> Result<Allocation, RuleError> {
    allocate(&RuleSpec::proportional(weights.to_vec())?, competition)
}

pub fn allocate_counterexample(
    rule: &CounterexampleRule,
    competition: &Competition,
) -> Result<Allocation, RuleError> {
    rule.allocate(competition)
}

/// Shares of the top ten in the two golf events used as the reference
/// proportional rule.
pub const GOLF_SHARES: [f64; 10] = [18.0, 10.9, 6.9, 4.9, 4.1, 3.63, 3.38, 3.13, 2.93, 2.73];

/// The rule set exercised by the axiom matrix, labelled.
pub fn bundled() -> Vec<(String, RuleSpec)> {
    let mut rules = vec![
        ("ed".to_string(), RuleSpec::Ed),
        ("wta".to_string(), RuleSpec::Wta),
        ("wts(1)".to_string(), RuleSpec::Wts(1.0)),
        ("unit-step".to_string(), RuleSpec::unit_step()),
        (
            "geometric(0.5)".to_string(),
            RuleSpec::Geometric {
                lambda: 0.5,
                allow_increasing: false,
            },
        ),
        ("arithmetic".to_string(), RuleSpec::arithmetic()),
        ("hyperarithmetic".to_string(), RuleSpec::hyperarithmetic()),
        (
            "golf-proportional".to_string(),
            RuleSpec::Proportional(GOLF_SHARES.to_vec()),
        ),
    ];
    for name in CounterexampleRule::NAMES {
        let cx: CounterexampleRule = name.parse().expect("bundled counterexample name");
        rules.push((name.to_string(), RuleSpec::Counterexample(cx)));
    }
    rules
}

fn fmt_bound(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v.is_infinite() {
        f.write_str("inf")
    } else {
        write!(f, "{v}")
    }
}

fn fmt_monotone(f: &mut fmt::Formatter<'_>, m: &MonotoneFn) -> fmt::Result {
    match m {
        MonotoneFn::Identity => f.write_str("identity"),
        MonotoneFn::Zero => f.write_str("zero"),
        MonotoneFn::Linear(l) => write!(f, "linear={l}"),
        MonotoneFn::Shift(c) if *c == 1.0 => f.write_str("arithmetic"),
        MonotoneFn::Shift(c) => write!(f, "shift={c}"),
        MonotoneFn::Cap(a) => {
            f.write_str("cap=")?;
            fmt_bound(f, *a)
        }
        MonotoneFn::Piecewise(p) => {
            f.write_str("pwl=")?;
            let pts: Vec<String> = p
                .points()
                .iter()
                .skip(1)
                .map(|(x, y)| format!("{x}:{y}"))
                .collect();
            f.write_str(&pts.join(","))
        }
    }
}

/// Renders the rule in the rule-spec mini-language.
impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Ed => f.write_str("ed"),
            RuleSpec::Wta => f.write_str("wta"),
            RuleSpec::Wts(a) => {
                f.write_str("wts:a=")?;
                fmt_bound(f, *a)
            }
            RuleSpec::Interval(list) => {
                if *list == IntervalList::unit_steps(list.len()) && !list.is_empty() {
                    return write!(f, "interval:steps={}", list.len());
                }
                f.write_str("interval:")?;
                for (k, (a, b)) in list.intervals().iter().enumerate() {
                    if k > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "[{a},")?;
                    fmt_bound(f, *b)?;
                    f.write_str("]")?;
                }
                Ok(())
            }
            RuleSpec::SingleParametric(m) => {
                f.write_str("sp:")?;
                fmt_monotone(f, m)
            }
            RuleSpec::Parametric(ParametricFamily::Hyperarithmetic) => {
                f.write_str("param:hyperarithmetic")
            }
            RuleSpec::Parametric(ParametricFamily::Iterates(m)) => {
                f.write_str("sp:")?;
                fmt_monotone(f, m)
            }
            RuleSpec::Parametric(ParametricFamily::Listed(fs)) => {
                f.write_str("param:list=")?;
                for (k, m) in fs.iter().enumerate() {
                    if k > 0 {
                        f.write_str("|")?;
                    }
                    fmt_monotone(f, m)?;
                }
                Ok(())
            }
            RuleSpec::Geometric {
                lambda,
                allow_increasing,
            } => {
                write!(f, "geometric:lambda={lambda}")?;
                if *allow_increasing {
                    f.write_str(",unchecked")?;
                }
                Ok(())
            }
            RuleSpec::Proportional(w) => {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "proportional:{}", parts.join(","))
            }
            RuleSpec::Counterexample(cx) => write!(f, "cx:{cx}"),
        }
    }
}
