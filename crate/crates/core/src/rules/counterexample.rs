//! Rules that each break exactly one axiom. They exist to show the axioms
//! are independent and to exercise the falsifiers.

use std::fmt;
use std::str::FromStr;

use super::RuleError;
use crate::model::{Allocation, Competition, CompetitorId};

#[derive(Debug, Clone, PartialEq)]
pub enum CounterexampleRule {
    /// Everything to the last-ranked competitor.
    LowestTakesAll,
    /// Equal division while `E <= 1`, winner-takes-all above.
    ThresholdSwitch,
    /// Equal split between `first` and `second` when they hold positions 1
    /// and 2, winner-takes-all otherwise.
    PairFavoritism {
        first: CompetitorId,
        second: CompetitorId,
    },
    /// Dollar-by-dollar schedule: position 1; then 2, 1; then 3, 2, 1; …;
    /// then n, …, 1; afterwards rounds n, n−1, …, 1 repeat.
    LateDollar,
    /// Equal division for two competitors, winner-takes-all otherwise.
    Ed2Wta3,
}

impl CounterexampleRule {
    pub const NAMES: [&'static str; 5] = [
        "lowest-takes-all",
        "threshold-switch",
        "pair-favoritism",
        "late-dollar",
        "ed2-wta3",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CounterexampleRule::LowestTakesAll => "lowest-takes-all",
            CounterexampleRule::ThresholdSwitch => "threshold-switch",
            CounterexampleRule::PairFavoritism { .. } => "pair-favoritism",
            CounterexampleRule::LateDollar => "late-dollar",
            CounterexampleRule::Ed2Wta3 => "ed2-wta3",
        }
    }

    /// Pair favoritism for the canonical ids `c1`, `c2`.
    pub fn pair_favoritism_default() -> Self {
        CounterexampleRule::PairFavoritism {
            first: CompetitorId::indexed(1),
            second: CompetitorId::indexed(2),
        }
    }

    pub fn allocate(&self, competition: &Competition) -> Result<Allocation, RuleError> {
        let n = competition.size();
        let e = competition.endowment();
        let prizes = match self {
            CounterexampleRule::LowestTakesAll => {
                let mut p = vec![0.0; n];
                if let Some(last) = p.last_mut() {
                    *last = e;
                }
                p
            }
            CounterexampleRule::ThresholdSwitch => {
                if e <= 1.0 {
                    vec![e / n as f64; n]
                } else {
                    winner_takes_all(n, e)
                }
            }
            CounterexampleRule::PairFavoritism { first, second } => {
                let ranking = competition.ranking();
                let favoured = ranking.at(1) == Some(first) && ranking.at(2) == Some(second);
                if favoured {
                    let mut p = vec![0.0; n];
                    p[0] = e / 2.0;
                    p[1] = e / 2.0;
                    p
                } else {
                    winner_takes_all(n, e)
                }
            }
            CounterexampleRule::LateDollar => late_dollar(n, e),
            CounterexampleRule::Ed2Wta3 => {
                if n == 2 {
                    vec![e / 2.0; 2]
                } else {
                    winner_takes_all(n, e)
                }
            }
        };
        Ok(Allocation::from_positions(competition.ranking(), prizes)?)
    }
}

fn winner_takes_all(n: usize, e: f64) -> Vec<f64> {
    let mut p = vec![0.0; n];
    if n > 0 {
        p[0] = e;
    }
    p
}

fn late_dollar(n: usize, e: f64) -> Vec<f64> {
    let mut prizes = vec![0.0; n];
    if n == 0 {
        return prizes;
    }
    let mut rest = e;
    // triangular phase, ends at (n, n-1, …, 1)
    for stage in 1..=n {
        for pos in (1..=stage).rev() {
            let step = rest.min(1.0);
            prizes[pos - 1] += step;
            rest -= step;
            if rest <= 0.0 {
                return prizes;
            }
        }
    }
    let rounds = (rest / n as f64).floor();
    for p in &mut prizes {
        *p += rounds;
    }
    rest -= rounds * n as f64;
    for pos in (1..=n).rev() {
        if rest <= 0.0 {
            break;
        }
        let step = rest.min(1.0);
        prizes[pos - 1] += step;
        rest -= step;
    }
    prizes
}

impl fmt::Display for CounterexampleRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CounterexampleRule::PairFavoritism { first, second }
                if (first.as_str(), second.as_str()) != ("c1", "c2") =>
            {
                write!(f, "pair-favoritism={first},{second}")
            }
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for CounterexampleRule {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match s.split_once('=') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let rule = match (name, arg) {
            ("lowest-takes-all", None) => CounterexampleRule::LowestTakesAll,
            ("threshold-switch", None) => CounterexampleRule::ThresholdSwitch,
            ("late-dollar", None) => CounterexampleRule::LateDollar,
            ("ed2-wta3", None) => CounterexampleRule::Ed2Wta3,
            ("pair-favoritism", None) => Self::pair_favoritism_default(),
            ("pair-favoritism", Some(arg)) => {
                let (i, j) = arg.split_once(',').ok_or_else(|| {
                    RuleError::InvalidRuleParams("pair-favoritism needs two ids `i,j`".into())
                })?;
                let first = CompetitorId::new(i.trim())?;
                let second = CompetitorId::new(j.trim())?;
                if first == second {
                    return Err(RuleError::InvalidRuleParams(
                        "pair-favoritism ids must differ".into(),
                    ));
                }
                CounterexampleRule::PairFavoritism { first, second }
            }
            _ => return Err(RuleError::UnknownCounterexample(s.to_string())),
        };
        Ok(rule)
    }
}
