use std::fmt;

use serde::{Deserialize, Serialize};

use super::sampling::qualifies;
use super::{Axiom, MonotonicityMode, OrderMode};
use crate::model::{Competition, CompetitorId};
use crate::rules::{allocate_with, RuleError, RuleSpec};
use crate::solver::SolverConfig;

/// Inequality an axiom requires between the two observed sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    LessEq,
    Less,
    GreaterEq,
    Greater,
}

impl Relation {
    /// `Some(margin)` when `lhs rel rhs` fails at tolerance `tol`.
    ///
    /// For equality and weak relations the margin is the excess beyond the
    /// allowed side and is always `> tol`. For strict relations it is the
    /// gap `rhs - lhs` (`Less`) or `lhs - rhs` (`Greater`), which is `<= tol`.
    pub fn violation(self, lhs: f64, rhs: f64, tol: f64) -> Option<f64> {
        let (bad, margin) = match self {
            Relation::Equal => {
                let d = (lhs - rhs).abs();
                (d > tol, d)
            }
            Relation::LessEq => (lhs - rhs > tol, lhs - rhs),
            Relation::GreaterEq => (rhs - lhs > tol, rhs - lhs),
            Relation::Less => (rhs - lhs <= tol, rhs - lhs),
            Relation::Greater => (lhs - rhs <= tol, lhs - rhs),
        };
        bad.then_some(margin)
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Less | Relation::Greater)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::LessEq => "<=",
            Relation::Less => "<",
            Relation::GreaterEq => ">=",
            Relation::Greater => ">",
        }
    }
}

/// The concrete instance an axiom is evaluated on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Probe {
    /// Two competitions of equal size and endowment; compares the prizes at
    /// `position`.
    Relabel {
        first: Competition,
        second: Competition,
        position: usize,
    },
    /// Compares the prizes at positions `higher < lower`.
    Positions {
        competition: Competition,
        higher: usize,
        lower: usize,
    },
    /// Compares `competitor`'s prize at the competition's endowment with the
    /// prize at the larger endowment `larger`.
    Endowments {
        competition: Competition,
        larger: f64,
        competitor: CompetitorId,
    },
    /// `φ_i(E)` against `E · φ_i(1)`.
    Homogeneity {
        competition: Competition,
        competitor: CompetitorId,
    },
    /// `φ_i(E + other)` against `φ_i(E) + φ_i(other)`.
    Additivity {
        competition: Competition,
        other: f64,
        competitor: CompetitorId,
    },
    /// `φ_i(N, R, E)` against `φ_i(S, R_S, Σ_{j∈S} φ_j(N, R, E))`.
    Reduction {
        competition: Competition,
        subset: Vec<CompetitorId>,
        competitor: CompetitorId,
    },
}

impl Probe {
    pub fn competition(&self) -> &Competition {
        match self {
            Probe::Relabel { first, .. } => first,
            Probe::Positions { competition, .. }
            | Probe::Endowments { competition, .. }
            | Probe::Homogeneity { competition, .. }
            | Probe::Additivity { competition, .. }
            | Probe::Reduction { competition, .. } => competition,
        }
    }

    /// Whether the probe is a legitimate instance of `axiom`.
    pub fn qualifies_for(&self, axiom: Axiom, pair_only: bool) -> bool {
        let c = self.competition();
        let n = c.size();
        match (axiom, self) {
            (
                Axiom::Anonymity,
                Probe::Relabel {
                    first,
                    second,
                    position,
                },
            ) => {
                first.size() == second.size()
                    && first.endowment() == second.endowment()
                    && (1..=n).contains(position)
            }
            (Axiom::OrderPreservation(mode), Probe::Positions { higher, lower, .. }) => {
                let base = higher < lower && *lower <= n;
                match mode {
                    OrderMode::Weak => base,
                    OrderMode::Strict => base && c.endowment() > 0.0,
                    OrderMode::WinnerLoserStrict => {
                        base && *higher == 1 && *lower == n && c.endowment() > 0.0
                    }
                }
            }
            (
                Axiom::EndowmentMonotonicity(mode),
                Probe::Endowments {
                    larger, competitor, ..
                },
            ) => {
                let base = c.endowment() < *larger && c.ranking().contains(competitor);
                match mode {
                    MonotonicityMode::WinnerStrict => {
                        base && c.ranking().position(competitor) == Some(1)
                    }
                    _ => base,
                }
            }
            (
                Axiom::Lipschitz,
                Probe::Endowments {
                    larger, competitor, ..
                },
            ) => c.endowment() < *larger && c.ranking().contains(competitor),
            (Axiom::ScaleInvariance, Probe::Homogeneity { competitor, .. }) => {
                c.ranking().contains(competitor)
            }
            (
                Axiom::ScaleInvariance,
                Probe::Additivity {
                    other, competitor, ..
                },
            ) => *other >= 0.0 && c.ranking().contains(competitor),
            (
                Axiom::Consistency(mode),
                Probe::Reduction {
                    subset, competitor, ..
                },
            ) => {
                if !subset.contains(competitor) || subset.iter().any(|s| !c.ranking().contains(s)) {
                    return false;
                }
                let mut positions: Vec<usize> = subset
                    .iter()
                    .filter_map(|s| c.ranking().position(s))
                    .collect();
                positions.sort_unstable();
                positions.dedup();
                positions.len() == subset.len() && qualifies(&positions, mode, pair_only)
            }
            _ => false,
        }
    }
}

/// The two sides of a relation, as observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
}

fn relation_for(axiom: Axiom) -> Relation {
    match axiom {
        Axiom::Anonymity | Axiom::ScaleInvariance | Axiom::Consistency(_) => Relation::Equal,
        Axiom::OrderPreservation(OrderMode::Weak) => Relation::GreaterEq,
        Axiom::OrderPreservation(_) => Relation::Greater,
        Axiom::EndowmentMonotonicity(MonotonicityMode::Weak) => Relation::LessEq,
        Axiom::EndowmentMonotonicity(_) => Relation::Less,
        Axiom::Lipschitz => Relation::LessEq,
    }
}

fn prize(
    rule: &RuleSpec,
    c: &Competition,
    id: &CompetitorId,
    cfg: &SolverConfig,
) -> Result<f64, RuleError> {
    let alloc = allocate_with(rule, c, cfg)?;
    alloc.get(id).ok_or_else(|| {
        RuleError::InvalidRuleParams(format!("competitor {id} missing from the allocation"))
    })
}

fn at_position(
    rule: &RuleSpec,
    c: &Competition,
    position: usize,
    cfg: &SolverConfig,
) -> Result<f64, RuleError> {
    let id = c
        .ranking()
        .at(position)
        .ok_or_else(|| RuleError::InvalidRuleParams(format!("position {position} out of range")))?;
    prize(rule, c, id, cfg)
}

/// Evaluates both sides of `axiom` on `probe` from scratch.
pub fn evaluate(
    rule: &RuleSpec,
    axiom: Axiom,
    probe: &Probe,
    cfg: &SolverConfig,
) -> Result<Observation, RuleError> {
    let relation = relation_for(axiom);
    let (lhs, rhs) = match probe {
        Probe::Relabel {
            first,
            second,
            position,
        } => (
            at_position(rule, first, *position, cfg)?,
            at_position(rule, second, *position, cfg)?,
        ),
        Probe::Positions {
            competition,
            higher,
            lower,
        } => (
            at_position(rule, competition, *higher, cfg)?,
            at_position(rule, competition, *lower, cfg)?,
        ),
        Probe::Endowments {
            competition,
            larger,
            competitor,
        } => {
            let small = prize(rule, competition, competitor, cfg)?;
            let big = prize(rule, &competition.with_endowment(*larger)?, competitor, cfg)?;
            if axiom == Axiom::Lipschitz {
                ((big - small).abs(), larger - competition.endowment())
            } else {
                (small, big)
            }
        }
        Probe::Homogeneity {
            competition,
            competitor,
        } => {
            let at_e = prize(rule, competition, competitor, cfg)?;
            let at_one = prize(rule, &competition.with_endowment(1.0)?, competitor, cfg)?;
            (at_e, competition.endowment() * at_one)
        }
        Probe::Additivity {
            competition,
            other,
            competitor,
        } => {
            let e = competition.endowment();
            let joint = prize(
                rule,
                &competition.with_endowment(e + other)?,
                competitor,
                cfg,
            )?;
            let split = prize(rule, competition, competitor, cfg)?
                + prize(rule, &competition.with_endowment(*other)?, competitor, cfg)?;
            (joint, split)
        }
        Probe::Reduction {
            competition,
            subset,
            competitor,
        } => {
            let full = allocate_with(rule, competition, cfg)?;
            let mut sub_endowment = 0.0;
            for id in subset {
                sub_endowment += full.get(id).ok_or_else(|| {
                    RuleError::InvalidRuleParams(format!("competitor {id} not in the competition"))
                })?;
            }
            let reduced = competition.reduced(subset, sub_endowment)?;
            let lhs = full.get(competitor).unwrap_or(f64::NAN);
            (lhs, prize(rule, &reduced, competitor, cfg)?)
        }
    };
    Ok(Observation { lhs, rhs, relation })
}

/// A reproducible axiom violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub axiom: Axiom,
    pub probe: Probe,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub margin: f64,
}

impl Witness {
    /// Re-evaluates the probe from scratch; true iff the violation is
    /// reproduced at tolerance `tol`.
    pub fn reverify(&self, rule: &RuleSpec, tol: f64) -> Result<bool, RuleError> {
        let obs = evaluate(rule, self.axiom, &self.probe, &SolverConfig::default())?;
        Ok(obs.relation.violation(obs.lhs, obs.rhs, tol).is_some())
    }
}

/// Builds a witness if `probe` violates `axiom`.
pub(crate) fn witness_for(
    rule: &RuleSpec,
    axiom: Axiom,
    probe: Probe,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<Option<Witness>, RuleError> {
    let obs = evaluate(rule, axiom, &probe, cfg)?;
    Ok(obs
        .relation
        .violation(obs.lhs, obs.rhs, tol)
        .map(|margin| Witness {
            axiom,
            probe,
            lhs: obs.lhs,
            rhs: obs.rhs,
            relation: obs.relation,
            margin,
        }))
}

const MAX_SHRINK_STEPS: usize = 200;

/// Greedy shrinking: drop competitors, then subset members, then snap
/// endowments to round values, as long as the violation persists.
pub(crate) fn shrink(
    rule: &RuleSpec,
    witness: Witness,
    tol: f64,
    pair_only: bool,
    cfg: &SolverConfig,
) -> Result<Witness, RuleError> {
    let mut current = witness;
    for _ in 0..MAX_SHRINK_STEPS {
        let mut improved = None;
        for candidate in shrink_candidates(&current.probe) {
            if !candidate.qualifies_for(current.axiom, pair_only) {
                continue;
            }
            // a rule may reject the smaller instance, e.g. too few weights
            if let Ok(Some(w)) = witness_for(rule, current.axiom, candidate, tol, cfg) {
                improved = Some(w);
                break;
            }
        }
        match improved {
            Some(w) => current = w,
            None => break,
        }
    }
    Ok(current)
}

fn snaps(e: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for v in [e.round(), e.ceil(), (e * 4.0).round() / 4.0] {
        if v != e && v >= 0.0 && !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn without(c: &Competition, drop: &CompetitorId) -> Option<Competition> {
    let keep: Vec<CompetitorId> = c
        .ranking()
        .order()
        .iter()
        .filter(|id| *id != drop)
        .cloned()
        .collect();
    if keep.is_empty() {
        return None;
    }
    c.reduced(&keep, c.endowment()).ok()
}

fn shrink_candidates(probe: &Probe) -> Vec<Probe> {
    let mut out = Vec::new();
    let c = probe.competition();
    let ids: Vec<CompetitorId> = c.ranking().order().to_vec();
    match probe {
        Probe::Relabel {
            first,
            second,
            position,
        } => {
            for p in 1..=first.size() {
                if p == *position {
                    continue;
                }
                let (a, b) = (
                    first.ranking().at(p).cloned(),
                    second.ranking().at(p).cloned(),
                );
                if let (Some(a), Some(b)) = (a, b) {
                    if let (Some(f), Some(s)) = (without(first, &a), without(second, &b)) {
                        let position = if p < *position {
                            position - 1
                        } else {
                            *position
                        };
                        out.push(Probe::Relabel {
                            first: f,
                            second: s,
                            position,
                        });
                    }
                }
            }
            for e in snaps(first.endowment()) {
                if let (Ok(f), Ok(s)) = (first.with_endowment(e), second.with_endowment(e)) {
                    out.push(Probe::Relabel {
                        first: f,
                        second: s,
                        position: *position,
                    });
                }
            }
        }
        Probe::Positions {
            competition,
            higher,
            lower,
        } => {
            for (k, id) in ids.iter().enumerate() {
                let p = k + 1;
                if p == *higher || p == *lower {
                    continue;
                }
                if let Some(smaller) = without(competition, id) {
                    let shift = |q: usize| if p < q { q - 1 } else { q };
                    out.push(Probe::Positions {
                        competition: smaller,
                        higher: shift(*higher),
                        lower: shift(*lower),
                    });
                }
            }
            for e in snaps(competition.endowment()) {
                if let Ok(c) = competition.with_endowment(e) {
                    out.push(Probe::Positions {
                        competition: c,
                        higher: *higher,
                        lower: *lower,
                    });
                }
            }
        }
        Probe::Endowments {
            competition,
            larger,
            competitor,
        } => {
            for id in ids.iter().filter(|id| *id != competitor) {
                if let Some(smaller) = without(competition, id) {
                    out.push(Probe::Endowments {
                        competition: smaller,
                        larger: *larger,
                        competitor: competitor.clone(),
                    });
                }
            }
            for e in snaps(competition.endowment()) {
                if let Ok(c) = competition.with_endowment(e) {
                    out.push(Probe::Endowments {
                        competition: c,
                        larger: *larger,
                        competitor: competitor.clone(),
                    });
                }
            }
            for l in snaps(*larger) {
                out.push(Probe::Endowments {
                    competition: competition.clone(),
                    larger: l,
                    competitor: competitor.clone(),
                });
            }
        }
        Probe::Homogeneity {
            competition,
            competitor,
        } => {
            for id in ids.iter().filter(|id| *id != competitor) {
                if let Some(smaller) = without(competition, id) {
                    out.push(Probe::Homogeneity {
                        competition: smaller,
                        competitor: competitor.clone(),
                    });
                }
            }
            for e in snaps(competition.endowment()) {
                if let Ok(c) = competition.with_endowment(e) {
                    out.push(Probe::Homogeneity {
                        competition: c,
                        competitor: competitor.clone(),
                    });
                }
            }
        }
        Probe::Additivity {
            competition,
            other,
            competitor,
        } => {
            for id in ids.iter().filter(|id| *id != competitor) {
                if let Some(smaller) = without(competition, id) {
                    out.push(Probe::Additivity {
                        competition: smaller,
                        other: *other,
                        competitor: competitor.clone(),
                    });
                }
            }
            for e in snaps(competition.endowment()) {
                if let Ok(c) = competition.with_endowment(e) {
                    out.push(Probe::Additivity {
                        competition: c,
                        other: *other,
                        competitor: competitor.clone(),
                    });
                }
            }
            for o in snaps(*other) {
                out.push(Probe::Additivity {
                    competition: competition.clone(),
                    other: o,
                    competitor: competitor.clone(),
                });
            }
        }
        Probe::Reduction {
            competition,
            subset,
            competitor,
        } => {
            // competitors outside S first, then members of S
            let outside = ids.iter().filter(|id| !subset.contains(id));
            let inside = ids
                .iter()
                .filter(|id| subset.contains(id) && *id != competitor);
            for id in outside.chain(inside) {
                if let Some(smaller) = without(competition, id) {
                    let subset: Vec<CompetitorId> =
                        subset.iter().filter(|s| *s != id).cloned().collect();
                    out.push(Probe::Reduction {
                        competition: smaller,
                        subset,
                        competitor: competitor.clone(),
                    });
                }
            }
            for id in subset.iter().filter(|id| *id != competitor) {
                let smaller: Vec<CompetitorId> =
                    subset.iter().filter(|s| *s != id).cloned().collect();
                out.push(Probe::Reduction {
                    competition: competition.clone(),
                    subset: smaller,
                    competitor: competitor.clone(),
                });
            }
            for e in snaps(competition.endowment()) {
                if let Ok(c) = competition.with_endowment(e) {
                    out.push(Probe::Reduction {
                        competition: c,
                        subset: subset.clone(),
                        competitor: competitor.clone(),
                    });
                }
            }
        }
    }
    out
}

fn fmt_competition(f: &mut fmt::Formatter<'_>, c: &Competition) -> fmt::Result {
    let ids: Vec<&str> = c.ranking().order().iter().map(|id| id.as_str()).collect();
    write!(f, "({} ; E={})", ids.join(" > "), c.endowment())
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("  competition ")?;
        fmt_competition(f, self.probe.competition())?;
        f.write_str("\n  ")?;
        match &self.probe {
            Probe::Relabel {
                second, position, ..
            } => {
                f.write_str("relabelled ")?;
                fmt_competition(f, second)?;
                write!(f, "\n  prize at position {position}: ")?;
            }
            Probe::Positions { higher, lower, .. } => {
                write!(f, "prize at position {higher} vs position {lower}: ")?;
            }
            Probe::Endowments {
                competition,
                larger,
                competitor,
            } if self.axiom == Axiom::Lipschitz => {
                write!(
                    f,
                    "|φ_{competitor}(E={larger}) − φ_{competitor}(E={})| vs {larger} − {}: ",
                    competition.endowment(),
                    competition.endowment()
                )?;
            }
            Probe::Endowments {
                competition,
                larger,
                competitor,
            } => {
                write!(
                    f,
                    "φ_{competitor}(E={}) vs φ_{competitor}(E={larger}): ",
                    competition.endowment()
                )?;
            }
            Probe::Homogeneity {
                competition,
                competitor,
            } => {
                let e = competition.endowment();
                write!(f, "φ_{competitor}(E={e}) vs {e}·φ_{competitor}(E=1): ")?;
            }
            Probe::Additivity {
                competition,
                other,
                competitor,
            } => {
                let e = competition.endowment();
                write!(f, "φ_{competitor}(E={e}+{other}) vs φ_{competitor}(E={e}) + φ_{competitor}(E={other}): ")?;
            }
            Probe::Reduction {
                subset, competitor, ..
            } => {
                let s: Vec<&str> = subset.iter().map(|id| id.as_str()).collect();
                write!(
                    f,
                    "S = {{{}}}; φ_{competitor} in the full vs the reduced competition: ",
                    s.join(", ")
                )?;
            }
        }
        write!(
            f,
            "{} {} {} violated (margin {})",
            self.lhs,
            self.relation.symbol(),
            self.rhs,
            self.margin
        )
    }
}
