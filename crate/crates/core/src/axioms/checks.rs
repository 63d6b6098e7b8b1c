use serde::{Deserialize, Serialize};

use super::sampling::{sample_rankings, subsets};
use super::witness::{shrink, witness_for};
use super::{
    Axiom, AxiomError, ConsistencyMode, MonotonicityMode, OrderMode, Outcome, Probe, Relation,
    SampleBudget, Verdict,
};
use crate::model::{Competition, CompetitorId, Ranking};
use crate::rules::{allocate_with, RuleSpec};

/// Shared state of one check: the rule, the budget and the sampled rankings.
struct Run<'a> {
    rule: &'a RuleSpec,
    label: String,
    budget: &'a SampleBudget,
    rankings: Vec<Ranking>,
}

impl<'a> Run<'a> {
    fn new(rule: &'a RuleSpec, budget: &'a SampleBudget) -> Result<Self, AxiomError> {
        budget.validate()?;
        rule.validate()?;
        Ok(Self {
            rule,
            label: rule.to_string(),
            budget,
            rankings: sample_rankings(budget),
        })
    }

    fn prizes(&self, ranking: &Ranking, e: f64) -> Result<Vec<f64>, AxiomError> {
        let c = Competition::new(ranking.clone(), e).map_err(crate::rules::RuleError::from)?;
        Ok(allocate_with(self.rule, &c, &self.budget.solver)?.by_position())
    }

    /// Prize vectors for every grid endowment.
    fn path(&self, ranking: &Ranking) -> Result<Vec<Vec<f64>>, AxiomError> {
        self.budget
            .endowment_grid
            .iter()
            .map(|&e| self.prizes(ranking, e))
            .collect()
    }

    fn tol(&self) -> f64 {
        self.budget.tolerance
    }

    fn verdict(&self, axiom: Axiom, outcome: Outcome) -> Verdict {
        Verdict {
            axiom,
            rule: self.label.clone(),
            outcome,
            tolerance: self.tol(),
        }
    }

    fn pass(&self, axiom: Axiom, samples: usize) -> Verdict {
        self.verdict(axiom, Outcome::Pass { samples })
    }

    /// Turns a violating probe into a shrunk, re-verified failure verdict.
    fn fail(&self, axiom: Axiom, probe: Probe) -> Result<Verdict, AxiomError> {
        let cfg = &self.budget.solver;
        let witness = witness_for(self.rule, axiom, probe, self.tol(), cfg)?
            .expect("sampled violation reproduces from scratch");
        let witness = shrink(self.rule, witness, self.tol(), self.budget.pair_only, cfg)?;
        Ok(self.verdict(
            axiom,
            Outcome::Fail {
                witness: Box::new(witness),
            },
        ))
    }
}

fn competition(ranking: &Ranking, e: f64) -> Competition {
    Competition::new(ranking.clone(), e).expect("grid endowments are valid")
}

fn id_at(ranking: &Ranking, position: usize) -> CompetitorId {
    ranking
        .at(position)
        .expect("position within ranking")
        .clone()
}

pub fn check_anonymity(rule: &RuleSpec, budget: &SampleBudget) -> Result<Verdict, AxiomError> {
    let run = Run::new(rule, budget)?;
    let axiom = Axiom::Anonymity;
    let mut samples = 0;
    for n in 1..=budget.max_n {
        let group: Vec<&Ranking> = run.rankings.iter().filter(|r| r.len() == n).collect();
        let Some((base, others)) = group.split_first() else {
            continue;
        };
        let base_path = run.path(base)?;
        for other in others {
            let other_path = run.path(other)?;
            for (k, &e) in budget.endowment_grid.iter().enumerate() {
                for pos in 0..n {
                    samples += 1;
                    if Relation::Equal
                        .violation(base_path[k][pos], other_path[k][pos], run.tol())
                        .is_some()
                    {
                        let probe = Probe::Relabel {
                            first: competition(base, e),
                            second: competition(other, e),
                            position: pos + 1,
                        };
                        return run.fail(axiom, probe);
                    }
                }
            }
        }
    }
    Ok(run.pass(axiom, samples))
}

pub fn check_order_preservation(
    rule: &RuleSpec,
    budget: &SampleBudget,
    mode: OrderMode,
) -> Result<Verdict, AxiomError> {
    let run = Run::new(rule, budget)?;
    let axiom = Axiom::OrderPreservation(mode);
    let relation = if mode == OrderMode::Weak {
        Relation::GreaterEq
    } else {
        Relation::Greater
    };
    let mut samples = 0;
    for ranking in &run.rankings {
        let n = ranking.len();
        if n < 2 {
            continue;
        }
        for &e in &budget.endowment_grid {
            if mode != OrderMode::Weak && e <= 0.0 {
                continue;
            }
            let p = run.prizes(ranking, e)?;
            let pairs: Vec<(usize, usize)> = match mode {
                OrderMode::WinnerLoserStrict => vec![(1, n)],
                _ => (1..n)
                    .flat_map(|h| (h + 1..=n).map(move |l| (h, l)))
                    .collect(),
            };
            for (h, l) in pairs {
                samples += 1;
                if relation.violation(p[h - 1], p[l - 1], run.tol()).is_some() {
                    let probe = Probe::Positions {
                        competition: competition(ranking, e),
                        higher: h,
                        lower: l,
                    };
                    return run.fail(axiom, probe);
                }
            }
        }
    }
    Ok(run.pass(axiom, samples))
}

pub fn check_endowment_monotonicity(
    rule: &RuleSpec,
    budget: &SampleBudget,
    mode: MonotonicityMode,
) -> Result<Verdict, AxiomError> {
    let run = Run::new(rule, budget)?;
    let axiom = Axiom::EndowmentMonotonicity(mode);
    let relation = if mode == MonotonicityMode::Weak {
        Relation::LessEq
    } else {
        Relation::Less
    };
    let grid = &budget.endowment_grid;
    let mut samples = 0;
    for ranking in &run.rankings {
        let path = run.path(ranking)?;
        let positions = if mode == MonotonicityMode::WinnerStrict {
            1
        } else {
            ranking.len()
        };
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                for (pos, (lo, hi)) in path[i].iter().zip(&path[j]).enumerate().take(positions) {
                    samples += 1;
                    if relation.violation(*lo, *hi, run.tol()).is_some() {
                        let probe = Probe::Endowments {
                            competition: competition(ranking, grid[i]),
                            larger: grid[j],
                            competitor: id_at(ranking, pos + 1),
                        };
                        return run.fail(axiom, probe);
                    }
                }
            }
        }
    }
    Ok(run.pass(axiom, samples))
}

/// Runs weak endowment monotonicity and, if it passes, the Lipschitz check.
/// A rule that is not monotone gets a not-applicable verdict.
pub fn check_lipschitz(rule: &RuleSpec, budget: &SampleBudget) -> Result<Verdict, AxiomError> {
    let monotone = check_endowment_monotonicity(rule, budget, MonotonicityMode::Weak)?;
    if !monotone.passed() {
        let run = Run::new(rule, budget)?;
        return Ok(run.verdict(
            Axiom::Lipschitz,
            Outcome::NotApplicable {
                reason: "rule is not endowment monotone".into(),
            },
        ));
    }
    check_lipschitz_after(rule, budget, &monotone)
}

/// Lipschitz check given an existing weak-monotonicity verdict for the same
/// rule and budget.
pub fn check_lipschitz_after(
    rule: &RuleSpec,
    budget: &SampleBudget,
    monotone: &Verdict,
) -> Result<Verdict, AxiomError> {
    let run = Run::new(rule, budget)?;
    let certified = monotone.axiom == Axiom::EndowmentMonotonicity(MonotonicityMode::Weak)
        && monotone.rule == run.label
        && monotone.passed();
    if !certified {
        return Err(AxiomError::PreconditionNotChecked);
    }
    let axiom = Axiom::Lipschitz;
    let grid = &budget.endowment_grid;
    let mut samples = 0;
    for ranking in &run.rankings {
        let path = run.path(ranking)?;
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                for (pos, (lo, hi)) in path[i].iter().zip(&path[j]).enumerate() {
                    samples += 1;
                    let change = (hi - lo).abs();
                    if Relation::LessEq
                        .violation(change, grid[j] - grid[i], run.tol())
                        .is_some()
                    {
                        let probe = Probe::Endowments {
                            competition: competition(ranking, grid[i]),
                            larger: grid[j],
                            competitor: id_at(ranking, pos + 1),
                        };
                        return run.fail(axiom, probe);
                    }
                }
            }
        }
    }
    Ok(run.pass(axiom, samples))
}

/// Homogeneity `φ(E) = E·φ(1)` on the grid, then additivity
/// `φ(E + E′) = φ(E) + φ(E′)` over grid pairs.
pub fn check_scale_invariance(
    rule: &RuleSpec,
    budget: &SampleBudget,
) -> Result<Verdict, AxiomError> {
    let run = Run::new(rule, budget)?;
    let axiom = Axiom::ScaleInvariance;
    let grid = &budget.endowment_grid;
    let mut samples = 0;
    for ranking in &run.rankings {
        let path = run.path(ranking)?;
        let unit = run.prizes(ranking, 1.0)?;
        for (k, &e) in grid.iter().enumerate() {
            for pos in 0..ranking.len() {
                samples += 1;
                if Relation::Equal
                    .violation(path[k][pos], e * unit[pos], run.tol())
                    .is_some()
                {
                    let probe = Probe::Homogeneity {
                        competition: competition(ranking, e),
                        competitor: id_at(ranking, pos + 1),
                    };
                    return run.fail(axiom, probe);
                }
            }
        }
        for i in 0..grid.len() {
            for j in i..grid.len() {
                let joint = run.prizes(ranking, grid[i] + grid[j])?;
                for pos in 0..ranking.len() {
                    samples += 1;
                    if Relation::Equal
                        .violation(joint[pos], path[i][pos] + path[j][pos], run.tol())
                        .is_some()
                    {
                        let probe = Probe::Additivity {
                            competition: competition(ranking, grid[i]),
                            other: grid[j],
                            competitor: id_at(ranking, pos + 1),
                        };
                        return run.fail(axiom, probe);
                    }
                }
            }
        }
    }
    Ok(run.pass(axiom, samples))
}

pub fn check_consistency(
    rule: &RuleSpec,
    budget: &SampleBudget,
    mode: ConsistencyMode,
) -> Result<Verdict, AxiomError> {
    let run = Run::new(rule, budget)?;
    let axiom = Axiom::Consistency(mode);
    let mut samples = 0;
    for ranking in &run.rankings {
        let n = ranking.len();
        let sets = subsets(n, mode, budget.pair_only, budget.rng_seed);
        for &e in &budget.endowment_grid {
            let full = run.prizes(ranking, e)?;
            for positions in &sets {
                let members: Vec<CompetitorId> =
                    positions.iter().map(|&p| id_at(ranking, p)).collect();
                let sub_e: f64 = positions.iter().map(|&p| full[p - 1]).sum();
                let sub_ranking = ranking
                    .subranking(&members)
                    .map_err(crate::rules::RuleError::from)?;
                let reduced = run.prizes(&sub_ranking, sub_e)?;
                for (k, &p) in positions.iter().enumerate() {
                    samples += 1;
                    if Relation::Equal
                        .violation(full[p - 1], reduced[k], run.tol())
                        .is_some()
                    {
                        let probe = Probe::Reduction {
                            competition: competition(ranking, e),
                            subset: members.clone(),
                            competitor: id_at(ranking, p),
                        };
                        return run.fail(axiom, probe);
                    }
                }
            }
        }
    }
    Ok(run.pass(axiom, samples))
}

/// Dispatches to the checker for `axiom`.
pub fn check(rule: &RuleSpec, axiom: Axiom, budget: &SampleBudget) -> Result<Verdict, AxiomError> {
    match axiom {
        Axiom::Anonymity => check_anonymity(rule, budget),
        Axiom::OrderPreservation(m) => check_order_preservation(rule, budget, m),
        Axiom::EndowmentMonotonicity(m) => check_endowment_monotonicity(rule, budget, m),
        Axiom::Lipschitz => check_lipschitz(rule, budget),
        Axiom::ScaleInvariance => check_scale_invariance(rule, budget),
        Axiom::Consistency(m) => check_consistency(rule, budget, m),
    }
}

/// Verdicts for every (rule, axiom) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomMatrix {
    pub axioms: Vec<Axiom>,
    pub rows: Vec<(String, Vec<Verdict>)>,
}

impl AxiomMatrix {
    pub fn get(&self, rule: &str, axiom: Axiom) -> Option<&Verdict> {
        let col = self.axioms.iter().position(|a| *a == axiom)?;
        self.rows
            .iter()
            .find(|(label, _)| label == rule)
            .map(|(_, v)| &v[col])
    }

    /// Fixed-width text table of `P` / `F` / `N/A` symbols.
    pub fn render(&self) -> String {
        let label_width = self
            .rows
            .iter()
            .map(|(l, _)| l.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut out = format!("{:label_width$}", "rule");
        for a in &self.axioms {
            out.push(' ');
            out.push_str(a.name());
        }
        out.push('\n');
        for (label, verdicts) in &self.rows {
            out.push_str(&format!("{label:label_width$}"));
            for (a, v) in self.axioms.iter().zip(verdicts) {
                out.push_str(&format!(" {:<w$}", v.symbol(), w = a.name().len()));
            }
            out.truncate(out.trim_end().len());
            out.push('\n');
        }
        out
    }
}

/// Runs every axiom column on every labelled rule.
pub fn run_axiom_matrix(
    rules: &[(String, RuleSpec)],
    budget: &SampleBudget,
) -> Result<AxiomMatrix, AxiomError> {
    let axioms = Axiom::ALL.to_vec();
    let mut rows = Vec::with_capacity(rules.len());
    for (label, rule) in rules {
        let mut verdicts = Vec::with_capacity(axioms.len());
        let mut monotone: Option<Verdict> = None;
        for &axiom in &axioms {
            let verdict = match axiom {
                Axiom::Lipschitz => match &monotone {
                    Some(m) if m.passed() => check_lipschitz_after(rule, budget, m)?,
                    _ => check_lipschitz(rule, budget)?,
                },
                _ => check(rule, axiom, budget)?,
            };
            if axiom == Axiom::EndowmentMonotonicity(MonotonicityMode::Weak) {
                monotone = Some(verdict.clone());
            }
            verdicts.push(Verdict {
                rule: label.clone(),
                ..verdict
            });
        }
        rows.push((label.clone(), verdicts));
    }
    Ok(AxiomMatrix { axioms, rows })
}
