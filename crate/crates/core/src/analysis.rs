//! Fitting observed prize tables against the rule families.
//!
//! Fits report a maximum relative deviation and a verdict at `tau_fit`.
//! Data given in rounded units (thousands of dollars) are compared with an
//! extra absolute slack of `abs_slack` units.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Competition, EventSet, ModelError, PrizeTable};
use crate::rules::{allocate, RuleError, RuleSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("need at least {needed} positions, found {found}")]
    TooFewPositions { needed: usize, found: usize },
    #[error("no events given")]
    NoEvents,
    #[error("table `{0}` has no positive prize")]
    AllZero(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Rule(#[from] RuleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative tolerance of every fit.
    pub tau_fit: f64,
    /// Absolute slack in data units, absorbing rounding of the published
    /// figures.
    pub abs_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau_fit: 0.01,
            abs_slack: 1.0,
        }
    }
}

impl Tolerances {
    /// Relative tolerance only, no rounding slack.
    pub fn exact(tau_fit: f64) -> Self {
        Self {
            tau_fit,
            abs_slack: 0.0,
        }
    }

    /// Relative deviation of `predicted` from `observed` after the absolute
    /// slack is spent.
    fn deviation(&self, predicted: f64, observed: f64) -> f64 {
        let excess = ((predicted - observed).abs() - self.abs_slack).max(0.0);
        if excess == 0.0 {
            0.0
        } else if observed > 0.0 {
            excess / observed
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FitParams {
    Geometric {
        lambda: f64,
        min_ratio: f64,
        max_ratio: f64,
    },
    Proportional {
        shares: Vec<f64>,
    },
    Interval {
        b: f64,
        x: f64,
        a: f64,
        split: usize,
    },
    ScaleInvariance {
        shares: Vec<f64>,
    },
}

impl FitParams {
    pub fn family(&self) -> &'static str {
        match self {
            FitParams::Geometric { .. } => "geometric",
            FitParams::Proportional { .. } => "proportional",
            FitParams::Interval { .. } => "interval",
            FitParams::ScaleInvariance { .. } => "scale-invariance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: FitParams,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub max_rel_dev: f64,
    pub verdict: bool,
    pub tau_fit: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FitReport {
    fn new(params: FitParams, max_rel_dev: f64, tau_fit: f64, warnings: Vec<String>) -> Self {
        Self {
            params,
            max_rel_dev,
            verdict: max_rel_dev <= tau_fit,
            tau_fit,
            warnings,
        }
    }

    pub fn family(&self) -> &'static str {
        self.params.family()
    }
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.verdict { "fits" } else { "does not fit" };
        write!(
            f,
            "{}: {verdict} (max relative deviation {:.4}, tolerance {})",
            self.family(),
            self.max_rel_dev,
            self.tau_fit
        )?;
        match &self.params {
            FitParams::Geometric {
                lambda,
                min_ratio,
                max_ratio,
            } => write!(
                f,
                "\n  lambda = {lambda:.4}, consecutive ratios {min_ratio:.3} to {max_ratio:.3}"
            )?,
            FitParams::Proportional { shares } | FitParams::ScaleInvariance { shares } => {
                let s: Vec<String> = shares.iter().map(|v| format!("{v:.2}")).collect();
                write!(f, "\n  shares (%) = {}", s.join(", "))?
            }
            FitParams::Interval { b, x, a, split } => write!(
                f,
                "\n  b = {b}, x = {x}, a = {a}, split at position {split}"
            )?,
        }
        for w in &self.warnings {
            write!(f, "\n  warning: {w}")?;
        }
        Ok(())
    }
}

fn require_positions(table: &PrizeTable, needed: usize) -> Result<(), AnalysisError> {
    if table.len() < needed {
        return Err(AnalysisError::TooFewPositions {
            needed,
            found: table.len(),
        });
    }
    Ok(())
}

/// Geometric fit: `λ̂` is the geometric mean of consecutive ratios over the
/// positive prizes.
///
/// A block of zeros from position `m` on fits only `λ = 0` with `m = 2`;
/// for larger `m` the drop to zero counts as a full miss.
pub fn fit_geometric(table: &PrizeTable, tau_fit: f64) -> Result<FitReport, AnalysisError> {
    require_positions(table, 2)?;
    let p = &table.prizes;
    let mut warnings = Vec::new();
    if !table.is_non_increasing() {
        warnings.push("prizes are not non-increasing".to_string());
    }
    let positive = p.iter().take_while(|v| **v > 0.0).count();
    if positive == 0 {
        return Err(AnalysisError::AllZero(table.name.clone()));
    }
    let zero_tail = p[positive..].iter().all(|v| *v == 0.0);
    let ratios: Vec<f64> = p[..positive].windows(2).map(|w| w[1] / w[0]).collect();
    let lambda = if ratios.is_empty() {
        0.0
    } else {
        (ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp()
    };
    let mut dev: f64 = p
        .windows(2)
        .take(positive)
        .map(|w| (w[1] - lambda * w[0]).abs() / w[0])
        .fold(0.0, f64::max);
    if !zero_tail {
        warnings.push("a zero prize is followed by a positive one".to_string());
        dev = f64::INFINITY;
    } else if positive > 1 && positive < p.len() {
        dev = dev.max(1.0);
    }
    let (min_ratio, max_ratio) = if ratios.is_empty() {
        (0.0, 0.0)
    } else {
        (
            ratios.iter().copied().fold(f64::INFINITY, f64::min),
            ratios.iter().copied().fold(0.0, f64::max),
        )
    };
    Ok(FitReport::new(
        FitParams::Geometric {
            lambda,
            min_ratio,
            max_ratio,
        },
        dev,
        tau_fit,
        warnings,
    ))
}

/// Per-position shares in percent, averaged over events, and the worst
/// reconstruction deviation.
fn averaged_shares(events: &EventSet, tol: &Tolerances) -> Result<(Vec<f64>, f64), AnalysisError> {
    events.validate()?;
    let first = events.events.first().ok_or(AnalysisError::NoEvents)?;
    require_positions(first, 1)?;
    let n = first.len();
    let mut shares = vec![0.0; n];
    for e in &events.events {
        for (s, v) in shares.iter_mut().zip(e.shares()) {
            *s += v;
        }
    }
    let count = events.events.len() as f64;
    shares.iter_mut().for_each(|s| *s /= count);
    let dev = events
        .events
        .iter()
        .flat_map(|e| {
            e.prizes
                .iter()
                .zip(&shares)
                .map(move |(obs, s)| tol.deviation(s / 100.0 * e.endowment, *obs))
        })
        .fold(0.0, f64::max);
    Ok((shares, dev))
}

/// Proportional fit: shares averaged across events must be non-increasing
/// and reproduce every event's prizes.
pub fn fit_proportional(events: &EventSet, tol: &Tolerances) -> Result<FitReport, AnalysisError> {
    let (shares, mut dev) = averaged_shares(events, tol)?;
    let mut warnings = Vec::new();
    if shares.windows(2).any(|w| w[1] > w[0]) {
        warnings.push("averaged shares are not non-increasing".to_string());
        dev = f64::INFINITY;
    }
    if shares.first().is_some_and(|s| *s <= 0.0) {
        warnings.push("first share is zero".to_string());
        dev = f64::INFINITY;
    }
    Ok(FitReport::new(
        FitParams::Proportional { shares },
        dev,
        tol.tau_fit,
        warnings,
    ))
}

/// Whether the events share one prize profile up to scale, that is whether
/// each event is reproduced by the averaged shares.
pub fn fit_scale_invariance(
    events: &EventSet,
    tol: &Tolerances,
) -> Result<FitReport, AnalysisError> {
    let (shares, dev) = averaged_shares(events, tol)?;
    Ok(FitReport::new(
        FitParams::ScaleInvariance { shares },
        dev,
        tol.tau_fit,
        Vec::new(),
    ))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn rel(value: f64, target: f64, scale: f64) -> f64 {
    (value - target).abs() / target.abs().max(scale * 1e-12).max(f64::MIN_POSITIVE)
}

/// Looks for the shape `(b, …, b, x, a, …, a)` with `a <= x <= b`. The largest
/// matching split position is reported; without a match, the closest split.
pub fn detect_interval_pattern(
    table: &PrizeTable,
    tau_fit: f64,
) -> Result<FitReport, AnalysisError> {
    require_positions(table, 2)?;
    let p = &table.prizes;
    let n = p.len();
    let scale = p.iter().copied().fold(0.0, f64::max);
    let mut best: Option<(f64, FitParams)> = None;
    let mut matched: Option<(f64, FitParams)> = None;
    for split in 1..=n {
        let x = p[split - 1];
        let (prefix, suffix) = (&p[..split - 1], &p[split..]);
        let b = if prefix.is_empty() { x } else { mean(prefix) };
        let a = if suffix.is_empty() { x } else { mean(suffix) };
        let mut dev = prefix
            .iter()
            .chain(suffix)
            .zip(std::iter::repeat_n(b, prefix.len()).chain(std::iter::repeat_n(a, suffix.len())))
            .map(|(v, t)| rel(*v, t, scale))
            .fold(0.0, f64::max);
        if x > b {
            dev = dev.max(rel(x, b, scale));
        }
        if x < a {
            dev = dev.max(rel(x, a, scale));
        }
        let params = FitParams::Interval { b, x, a, split };
        if dev <= tau_fit {
            matched = Some((dev, params.clone()));
        }
        if best.as_ref().is_none_or(|(d, _)| dev < *d) {
            best = Some((dev, params));
        }
    }
    let (dev, params) = matched.or(best).expect("at least one split");
    Ok(FitReport::new(params, dev, tau_fit, Vec::new()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    /// Shape of an interval-rule allocation, necessary for consistency.
    ConsistentShape,
    /// Geometric, the locally consistent family.
    LocallyConsistent,
    /// Proportional, the top consistent family.
    TopConsistent,
    Unordered,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::ConsistentShape => "consistent-shape",
            Tier::LocallyConsistent => "locally-consistent",
            Tier::TopConsistent => "top-consistent",
            Tier::Unordered => "unordered",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub order_preserved: bool,
    pub geometric: FitReport,
    pub proportional: FitReport,
    pub interval_pattern: FitReport,
    pub scale_invariant_across_events: Option<FitReport>,
    pub tier: Tier,
}

/// Tier from the component verdicts alone.
pub fn tier_of(order_preserved: bool, interval: bool, geometric: bool, proportional: bool) -> Tier {
    if !order_preserved {
        Tier::Unordered
    } else if interval {
        Tier::ConsistentShape
    } else if geometric {
        Tier::LocallyConsistent
    } else if proportional {
        Tier::TopConsistent
    } else {
        Tier::Unordered
    }
}

/// Worst of the per-event reports (an event failing beats one fitting).
fn worst(reports: Vec<FitReport>) -> FitReport {
    reports
        .into_iter()
        .max_by(|a, b| a.max_rel_dev.total_cmp(&b.max_rel_dev))
        .expect("at least one event")
}

/// Runs the geometric, proportional and interval fits plus the cross-event
/// scale check, and assigns a tier.
pub fn classify(events: &EventSet, tol: &Tolerances) -> Result<Classification, AnalysisError> {
    events.validate()?;
    if events.events.is_empty() {
        return Err(AnalysisError::NoEvents);
    }
    let order_preserved = events.events.iter().all(PrizeTable::is_non_increasing);
    let geometric = worst(
        events
            .events
            .iter()
            .map(|e| fit_geometric(e, tol.tau_fit))
            .collect::<Result<_, _>>()?,
    );
    let interval_pattern = worst(
        events
            .events
            .iter()
            .map(|e| detect_interval_pattern(e, tol.tau_fit))
            .collect::<Result<_, _>>()?,
    );
    let proportional = fit_proportional(events, tol)?;
    let scale_invariant_across_events = if events.events.len() > 1 {
        Some(fit_scale_invariance(events, tol)?)
    } else {
        None
    };
    let tier = tier_of(
        order_preserved,
        interval_pattern.verdict,
        geometric.verdict,
        proportional.verdict,
    );
    Ok(Classification {
        order_preserved,
        geometric,
        proportional,
        interval_pattern,
        scale_invariant_across_events,
        tier,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefixCheck {
    pub length: usize,
    pub predicted: Vec<f64>,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub max_rel_dev: f64,
}

/// Prefix-by-prefix comparison of a table with a rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataConsistency {
    pub rule: String,
    pub table: String,
    pub prefixes: Vec<PrefixCheck>,
    /// Shortest prefix that is not reproduced.
    pub first_failure: Option<usize>,
    pub tolerances: Tolerances,
}

impl DataConsistency {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// For each prefix length `m`, allocates the sum of the top `m` observed
/// prizes among `m` competitors and compares with the observed prizes.
pub fn check_data_top_consistency(
    table: &PrizeTable,
    rule: &RuleSpec,
    tol: &Tolerances,
) -> Result<DataConsistency, AnalysisError> {
    require_positions(table, 1)?;
    let mut prefixes = Vec::with_capacity(table.len());
    let mut first_failure = None;
    for m in 1..=table.len() {
        let observed = &table.prizes[..m];
        let total: f64 = observed.iter().sum();
        let predicted = allocate(rule, &Competition::canonical(m, total)?)?.by_position();
        let max_rel_dev = predicted
            .iter()
            .zip(observed)
            .map(|(p, o)| tol.deviation(*p, *o))
            .fold(0.0, f64::max);
        if max_rel_dev > tol.tau_fit && first_failure.is_none() {
            first_failure = Some(m);
        }
        prefixes.push(PrefixCheck {
            length: m,
            predicted,
            max_rel_dev,
        });
    }
    Ok(DataConsistency {
        rule: rule.to_string(),
        table: table.name.clone(),
        prefixes,
        first_failure,
        tolerances: *tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const POKER_SHARES: [f64; 10] = [14.9, 10.6, 7.57, 5.40, 3.85, 2.74, 1.96, 1.39, 0.99, 0.71];

    fn table(prizes: &[f64], e: f64) -> PrizeTable {
        PrizeTable::new("t", e, prizes.to_vec()).unwrap()
    }

    #[test]
    fn geometric_examples() {
        let r = fit_geometric(&table(&POKER_SHARES, 100.0), 0.01).unwrap();
        let FitParams::Geometric { lambda, .. } = r.params else {
            panic!()
        };
        assert!((lambda - 0.713).abs() <= 0.005, "{lambda}");
        assert!(r.verdict);

        let r = fit_geometric(&table(&[8.0, 4.0, 2.0, 1.0], 15.0), 0.01).unwrap();
        assert_eq!(
            r.params,
            FitParams::Geometric {
                lambda: 0.5,
                min_ratio: 0.5,
                max_ratio: 0.5
            }
        );
        assert_eq!(r.max_rel_dev, 0.0);

        let golf = crate::rules::GOLF_SHARES;
        let r = fit_geometric(&table(&golf, 100.0), 0.01).unwrap();
        let FitParams::Geometric {
            min_ratio,
            max_ratio,
            ..
        } = r.params
        else {
            panic!()
        };
        assert!(!r.verdict);
        assert!(
            min_ratio < 0.61 && max_ratio > 0.83,
            "{min_ratio} {max_ratio}"
        );
    }

    #[test]
    fn geometric_zero_tails() {
        let wta = fit_geometric(&table(&[5.0, 0.0, 0.0], 5.0), 0.01).unwrap();
        assert!(wta.verdict);
        let late = fit_geometric(&table(&[4.0, 2.0, 0.0], 6.0), 0.01).unwrap();
        assert!(!late.verdict);
        let gap = fit_geometric(&table(&[4.0, 0.0, 1.0], 6.0), 0.01).unwrap();
        assert!(!gap.verdict && gap.max_rel_dev.is_infinite());
        assert!(matches!(
            fit_geometric(&table(&[1.0], 1.0), 0.01),
            Err(AnalysisError::TooFewPositions { .. })
        ));
    }

    #[test]
    fn proportional_examples() {
        let one = EventSet::single(table(&[5.0, 3.0, 2.0], 10.0));
        let r = fit_proportional(&one, &Tolerances::exact(0.01)).unwrap();
        assert_eq!(
            r.params,
            FitParams::Proportional {
                shares: vec![50.0, 30.0, 20.0]
            }
        );
        assert!(r.verdict);

        let two = EventSet::new(vec![table(&[2.0, 1.0], 3.0), table(&[1.0, 2.0], 3.0)]).unwrap();
        assert!(
            !fit_proportional(&two, &Tolerances::exact(0.01))
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn interval_pattern_examples() {
        let r = detect_interval_pattern(&table(&[2.0, 2.0, 1.0, 1.0], 6.0), 0.01).unwrap();
        assert!(r.verdict);
        assert_eq!(
            r.params,
            FitParams::Interval {
                b: 2.0,
                x: 1.0,
                a: 1.0,
                split: 3
            }
        );
        assert!(
            detect_interval_pattern(&table(&[3.0, 3.0, 3.0], 9.0), 0.01)
                .unwrap()
                .verdict
        );
        assert!(
            !detect_interval_pattern(&table(&POKER_SHARES, 100.0), 0.01)
                .unwrap()
                .verdict
        );
        assert!(
            detect_interval_pattern(&table(&[6.5, 3.5], 10.0), 0.01)
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn tiers() {
        let c = classify(
            &EventSet::single(table(&[2.0, 2.0, 1.0, 1.0], 6.0)),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(c.tier, Tier::ConsistentShape);
        let c = classify(
            &EventSet::single(table(&POKER_SHARES, 100.0)),
            &Tolerances::exact(0.01),
        )
        .unwrap();
        assert_eq!(c.tier, Tier::LocallyConsistent);
        let c = classify(
            &EventSet::single(table(&[1.0, 2.0, 0.5], 5.0)),
            &Tolerances::exact(0.01),
        )
        .unwrap();
        assert_eq!(c.tier, Tier::Unordered);
        assert_eq!(tier_of(true, false, false, true), Tier::TopConsistent);
        assert_eq!(tier_of(true, false, false, false), Tier::Unordered);
    }

    #[test]
    fn data_top_consistency_of_exact_geometric() {
        let t = table(&[8.0, 4.0, 2.0, 1.0], 15.0);
        let ok = check_data_top_consistency(
            &t,
            &RuleSpec::geometric(0.5).unwrap(),
            &Tolerances::exact(1e-9),
        )
        .unwrap();
        assert!(ok.passed());
        let bad = check_data_top_consistency(&t, &RuleSpec::Ed, &Tolerances::exact(0.01)).unwrap();
        assert_eq!(bad.first_failure, Some(2));
    }
}
