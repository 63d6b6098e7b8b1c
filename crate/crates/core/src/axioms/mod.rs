//! Empirical axiom checkers.
//!
//! Each checker samples competitions from a [`SampleBudget`] and either
//! reports how many relation instances held or returns the first violation,
//! shrunk to a small reproducible [`Witness`]. A pass only means no
//! violation was found within the budget.

mod checks;
mod sampling;
mod witness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::DEFAULT_EQ_TOLERANCE;
use crate::rules::RuleError;
use crate::solver::SolverConfig;

pub use checks::{
    check, check_anonymity, check_consistency, check_endowment_monotonicity, check_lipschitz,
    check_lipschitz_after, check_order_preservation, check_scale_invariance, run_axiom_matrix,
    AxiomMatrix,
};
pub use sampling::default_grid;
pub use witness::{evaluate, Observation, Probe, Relation, Witness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxiomError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("invalid sample budget: {0}")]
    InvalidBudget(String),
    #[error("the Lipschitz check needs a passing weak endowment-monotonicity verdict on the same budget")]
    PreconditionNotChecked,
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderMode {
    Weak,
    WinnerLoserStrict,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonotonicityMode {
    Weak,
    WinnerStrict,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsistencyMode {
    Full,
    Bilateral,
    Local,
    Top,
}

/// One column of the axiom matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Axiom {
    Anonymity,
    OrderPreservation(OrderMode),
    EndowmentMonotonicity(MonotonicityMode),
    Lipschitz,
    ScaleInvariance,
    Consistency(ConsistencyMode),
}

impl Axiom {
    pub const ALL: [Axiom; 13] = [
        Axiom::Anonymity,
        Axiom::OrderPreservation(OrderMode::Weak),
        Axiom::OrderPreservation(OrderMode::WinnerLoserStrict),
        Axiom::OrderPreservation(OrderMode::Strict),
        Axiom::EndowmentMonotonicity(MonotonicityMode::Weak),
        Axiom::EndowmentMonotonicity(MonotonicityMode::WinnerStrict),
        Axiom::EndowmentMonotonicity(MonotonicityMode::Strict),
        Axiom::Lipschitz,
        Axiom::ScaleInvariance,
        Axiom::Consistency(ConsistencyMode::Full),
        Axiom::Consistency(ConsistencyMode::Bilateral),
        Axiom::Consistency(ConsistencyMode::Local),
        Axiom::Consistency(ConsistencyMode::Top),
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Axiom::Anonymity => "anonymity",
            Axiom::OrderPreservation(OrderMode::Weak) => "order",
            Axiom::OrderPreservation(OrderMode::WinnerLoserStrict) => "order-winner-loser",
            Axiom::OrderPreservation(OrderMode::Strict) => "order-strict",
            Axiom::EndowmentMonotonicity(MonotonicityMode::Weak) => "monotonicity",
            Axiom::EndowmentMonotonicity(MonotonicityMode::WinnerStrict) => "monotonicity-winner",
            Axiom::EndowmentMonotonicity(MonotonicityMode::Strict) => "monotonicity-strict",
            Axiom::Lipschitz => "lipschitz",
            Axiom::ScaleInvariance => "scale-invariance",
            Axiom::Consistency(ConsistencyMode::Full) => "consistency",
            Axiom::Consistency(ConsistencyMode::Bilateral) => "consistency-bilateral",
            Axiom::Consistency(ConsistencyMode::Local) => "consistency-local",
            Axiom::Consistency(ConsistencyMode::Top) => "consistency-top",
        }
    }

    /// Builds an axiom from a family name and an optional mode, as given on
    /// the command line (`--axiom consistency --mode local`).
    pub fn from_parts(axiom: &str, mode: Option<&str>) -> Result<Axiom, AxiomError> {
        let unknown = || {
            AxiomError::UnknownAxiom(match mode {
                Some(m) => format!("{axiom} --mode {m}"),
                None => axiom.to_string(),
            })
        };
        let family = axiom.trim().to_ascii_lowercase().replace('_', "-");
        let mode = mode.map(|m| m.trim().to_ascii_lowercase().replace('_', "-"));
        let mode = mode.as_deref();
        Ok(match family.as_str() {
            "anonymity" if mode.is_none() => Axiom::Anonymity,
            "lipschitz" if mode.is_none() => Axiom::Lipschitz,
            "scale-invariance" | "scale" | "additivity" if mode.is_none() => Axiom::ScaleInvariance,
            "order" | "order-preservation" => Axiom::OrderPreservation(match mode {
                None | Some("weak") => OrderMode::Weak,
                Some("winner-loser-strict") | Some("winner-loser") => OrderMode::WinnerLoserStrict,
                Some("strict") => OrderMode::Strict,
                _ => return Err(unknown()),
            }),
            "monotonicity" | "endowment-monotonicity" => Axiom::EndowmentMonotonicity(match mode {
                None | Some("weak") => MonotonicityMode::Weak,
                Some("winner-strict") | Some("winner") => MonotonicityMode::WinnerStrict,
                Some("strict") => MonotonicityMode::Strict,
                _ => return Err(unknown()),
            }),
            "consistency" => Axiom::Consistency(match mode {
                None | Some("full") => ConsistencyMode::Full,
                Some("bilateral") => ConsistencyMode::Bilateral,
                Some("local") => ConsistencyMode::Local,
                Some("top") => ConsistencyMode::Top,
                _ => return Err(unknown()),
            }),
            _ => match (Axiom::ALL.iter().find(|a| a.name() == family), mode) {
                (Some(a), None) => *a,
                _ => return Err(unknown()),
            },
        })
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = AxiomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Axiom::ALL
            .iter()
            .find(|a| a.name() == s)
            .copied()
            .ok_or_else(|| AxiomError::UnknownAxiom(s.to_string()))
    }
}

impl TryFrom<String> for Axiom {
    type Error = AxiomError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Axiom> for String {
    fn from(a: Axiom) -> Self {
        a.name().to_string()
    }
}

/// What to sample and how strictly to compare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBudget {
    /// Competitor counts `1..=max_n`.
    pub max_n: usize,
    /// Endowments, sorted ascending without duplicates.
    pub endowment_grid: Vec<f64>,
    pub rng_seed: u64,
    /// Restrict consistency checks to two-member subsets.
    pub pair_only: bool,
    /// Random rankings per competitor count, on top of the orderings of
    /// `c1 … cn`.
    pub rankings_per_n: usize,
    pub tolerance: f64,
    #[serde(skip)]
    pub solver: SolverConfig,
}

pub const DEFAULT_SEED: u64 = 2019;

impl Default for SampleBudget {
    fn default() -> Self {
        Self::with_seed(DEFAULT_SEED)
    }
}

impl SampleBudget {
    /// Default budget with the grid's random draws taken from `seed`.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            max_n: 5,
            endowment_grid: default_grid(seed),
            rng_seed: seed,
            pair_only: false,
            rankings_per_n: 3,
            tolerance: DEFAULT_EQ_TOLERANCE,
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), AxiomError> {
        let bad = |m: &str| Err(AxiomError::InvalidBudget(m.to_string()));
        if self.max_n < 2 {
            return bad("max_n must be at least 2");
        }
        if self.endowment_grid.is_empty() {
            return bad("endowment grid is empty");
        }
        if self
            .endowment_grid
            .iter()
            .any(|e| !(e.is_finite() && *e >= 0.0))
        {
            return bad("endowments must be finite and non-negative");
        }
        if self.endowment_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("endowment grid must be strictly increasing");
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return bad("tolerance must be finite and non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Outcome {
    Pass { samples: usize },
    Fail { witness: Box<Witness> },
    NotApplicable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub axiom: Axiom,
    pub rule: String,
    pub outcome: Outcome,
    pub tolerance: f64,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, Outcome::Pass { .. })
    }

    pub fn failed(&self) -> bool {
        matches!(self.outcome, Outcome::Fail { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            Outcome::Fail { witness } => Some(witness),
            _ => None,
        }
    }

    /// `P`, `F` or `N/A`.
    pub fn symbol(&self) -> &'static str {
        match self.outcome {
            Outcome::Pass { .. } => "P",
            Outcome::Fail { .. } => "F",
            Outcome::NotApplicable { .. } => "N/A",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            Outcome::Pass { samples } => {
                write!(
                    f,
                    "{} {}: pass ({samples} samples, tol {:e})",
                    self.rule, self.axiom, self.tolerance
                )
            }
            Outcome::Fail { witness } => write!(f, "{} {}: FAIL\n{witness}", self.rule, self.axiom),
            Outcome::NotApplicable { reason } => {
                write!(f, "{} {}: n/a ({reason})", self.rule, self.axiom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axiom_names_round_trip() {
        for a in Axiom::ALL {
            assert_eq!(a.name().parse::<Axiom>().unwrap(), a);
        }
        assert_eq!(
            Axiom::from_parts("consistency", Some("local")).unwrap(),
            Axiom::Consistency(ConsistencyMode::Local)
        );
        assert_eq!(
            Axiom::from_parts("order", Some("winner_loser_strict")).unwrap(),
            Axiom::OrderPreservation(OrderMode::WinnerLoserStrict)
        );
        assert!(Axiom::from_parts("anonymity", Some("strict")).is_err());
        assert!(Axiom::from_parts("fairness", None).is_err());
    }

    #[test]
    fn default_budget_is_valid() {
        let b = SampleBudget::default();
        b.validate().unwrap();
        assert!(b.endowment_grid.len() > 41);
        assert_eq!(b.endowment_grid[0], 0.0);
        assert_eq!(*b.endowment_grid.last().unwrap(), 10.0);
    }

    #[test]
    fn budget_validation() {
        assert!(SampleBudget {
            max_n: 1,
            ..SampleBudget::default()
        }
        .validate()
        .is_err());
        assert!(SampleBudget {
            endowment_grid: vec![1.0, 1.0],
            ..SampleBudget::default()
        }
        .validate()
        .is_err());
    }
}
