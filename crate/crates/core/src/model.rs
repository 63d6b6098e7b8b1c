//! Competitions, rankings, allocations and observed prize data.
//!
//! Everything here is immutable once constructed. A [`Ranking`] is stored as
//! the competitor list in position order, so it is a bijection onto `1..=n`
//! by construction.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("competitor identifiers must be non-empty")]
    EmptyId,
    #[error("duplicate competitor id `{0}`")]
    DuplicateId(String),
    #[error("positions are not a permutation of 1..={n}")]
    NotAPermutation { n: usize },
    #[error("got {ids} ids but {positions} positions")]
    LengthMismatch { ids: usize, positions: usize },
    #[error("endowment must be a finite non-negative number, got {0}")]
    NegativeEndowment(f64),
    #[error("subset must be non-empty")]
    EmptySubset,
    #[error("competitor `{0}` is not ranked")]
    UnknownCompetitor(String),
    #[error("allocation keys do not match the competitors")]
    KeyMismatch,
    #[error("invalid prize table `{name}`: {reason}")]
    InvalidPrizeTable { name: String, reason: String },
    #[error("events list different numbers of positions ({expected} vs {found})")]
    InconsistentPositionCounts { expected: usize, found: usize },
}

/// Opaque competitor token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CompetitorId(String);

impl CompetitorId {
    pub fn new(id: impl Into<String>) -> Result<Self, ModelError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ModelError::EmptyId);
        }
        Ok(Self(id))
    }

    /// Canonical id `c<k>` used by generated competitions.
    pub fn indexed(k: usize) -> Self {
        Self(format!("c{k}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for CompetitorId {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<CompetitorId> for String {
    fn from(id: CompetitorId) -> Self {
        id.0
    }
}

impl fmt::Display for CompetitorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Competitors in position order: `order[0]` holds position 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CompetitorId>", into = "Vec<CompetitorId>")]
pub struct Ranking {
    order: Vec<CompetitorId>,
}

impl Ranking {
    /// Builds a ranking from ids listed best first.
    pub fn from_order(order: Vec<CompetitorId>) -> Result<Self, ModelError> {
        let mut seen = HashSet::with_capacity(order.len());
        for id in &order {
            if !seen.insert(id) {
                return Err(ModelError::DuplicateId(id.to_string()));
            }
        }
        Ok(Self { order })
    }

    /// Builds a ranking from parallel id / position lists (positions 1-based).
    pub fn from_positions(ids: &[CompetitorId], positions: &[usize]) -> Result<Self, ModelError> {
        if ids.len() != positions.len() {
            return Err(ModelError::LengthMismatch {
                ids: ids.len(),
                positions: positions.len(),
            });
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in ids {
            if !seen.insert(id) {
                return Err(ModelError::DuplicateId(id.to_string()));
            }
        }
        let n = ids.len();
        let mut slots: Vec<Option<CompetitorId>> = vec![None; n];
        for (id, &pos) in ids.iter().zip(positions) {
            if pos == 0 || pos > n || slots[pos - 1].is_some() {
                return Err(ModelError::NotAPermutation { n });
            }
            slots[pos - 1] = Some(id.clone());
        }
        Ok(Self {
            order: slots.into_iter().map(Option::unwrap).collect(),
        })
    }

    /// `c1, c2, …, cn` in that order.
    pub fn canonical(n: usize) -> Self {
        Self {
            order: (1..=n).map(CompetitorId::indexed).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[CompetitorId] {
        &self.order
    }

    /// 1-based position of `id`.
    pub fn position(&self, id: &CompetitorId) -> Option<usize> {
        self.order.iter().position(|c| c == id).map(|p| p + 1)
    }

    /// Competitor at 1-based `position`.
    pub fn at(&self, position: usize) -> Option<&CompetitorId> {
        position.checked_sub(1).and_then(|p| self.order.get(p))
    }

    pub fn contains(&self, id: &CompetitorId) -> bool {
        self.order.contains(id)
    }

    /// Restriction of the ranking to `subset`, renumbered `1..=|subset|` with
    /// relative order kept.
    pub fn subranking(&self, subset: &[CompetitorId]) -> Result<Ranking, ModelError> {
        if subset.is_empty() {
            return Err(ModelError::EmptySubset);
        }
        let mut wanted = HashSet::with_capacity(subset.len());
        for id in subset {
            if !self.contains(id) {
                return Err(ModelError::UnknownCompetitor(id.to_string()));
            }
            wanted.insert(id);
        }
        let order = self
            .order
            .iter()
            .filter(|c| wanted.contains(c))
            .cloned()
            .collect();
        Ok(Ranking { order })
    }
}

impl TryFrom<Vec<CompetitorId>> for Ranking {
    type Error = ModelError;

    fn try_from(order: Vec<CompetitorId>) -> Result<Self, Self::Error> {
        Self::from_order(order)
    }
}

impl From<Ranking> for Vec<CompetitorId> {
    fn from(r: Ranking) -> Self {
        r.order
    }
}

/// A ranked set of competitors together with the prize endowment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Competition {
    ranking: Ranking,
    endowment: f64,
}

impl Competition {
    pub fn new(ranking: Ranking, endowment: f64) -> Result<Self, ModelError> {
        if !(endowment.is_finite() && endowment >= 0.0) {
            return Err(ModelError::NegativeEndowment(endowment));
        }
        Ok(Self { ranking, endowment })
    }

    /// Validated construction from raw ids and 1-based positions.
    pub fn from_parts(
        ids: &[&str],
        positions: &[usize],
        endowment: f64,
    ) -> Result<Self, ModelError> {
        let ids = ids
            .iter()
            .map(|s| CompetitorId::new(*s))
            .collect::<Result<Vec<_>, _>>()?;
        let ranking = Ranking::from_positions(&ids, positions)?;
        Self::new(ranking, endowment)
    }

    /// Canonical competition `c1 > c2 > … > cn` with endowment `endowment`.
    pub fn canonical(n: usize, endowment: f64) -> Result<Self, ModelError> {
        Self::new(Ranking::canonical(n), endowment)
    }

    pub fn ranking(&self) -> &Ranking {
        &self.ranking
    }

    pub fn endowment(&self) -> f64 {
        self.endowment
    }

    pub fn size(&self) -> usize {
        self.ranking.len()
    }

    pub fn with_endowment(&self, endowment: f64) -> Result<Self, ModelError> {
        Self::new(self.ranking.clone(), endowment)
    }

    /// Reduced competition on `subset` with the given endowment.
    pub fn reduced(&self, subset: &[CompetitorId], endowment: f64) -> Result<Self, ModelError> {
        Self::new(self.ranking.subranking(subset)?, endowment)
    }
}

/// Prizes keyed by competitor, stored in ranking order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    entries: Vec<(CompetitorId, f64)>,
}

impl Allocation {
    /// Pairs the ranking (best first) with prizes listed by position.
    pub fn from_positions(ranking: &Ranking, prizes: Vec<f64>) -> Result<Self, ModelError> {
        if prizes.len() != ranking.len() {
            return Err(ModelError::KeyMismatch);
        }
        Ok(Self {
            entries: ranking.order().iter().cloned().zip(prizes).collect(),
        })
    }

    pub fn from_entries(entries: Vec<(CompetitorId, f64)>) -> Self {
        Self { entries }
    }

    pub fn get(&self, id: &CompetitorId) -> Option<f64> {
        self.entries.iter().find(|(c, _)| c == id).map(|(_, p)| *p)
    }

    pub fn entries(&self) -> &[(CompetitorId, f64)] {
        &self.entries
    }

    /// Prizes in the order the entries are stored (ranking order when built
    /// by a rule).
    pub fn by_position(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, p)| *p).collect()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }
}

/// Default sum tolerance: `1e-9 · max(1, E)`.
pub fn default_sum_tolerance(endowment: f64) -> f64 {
    1e-9 * endowment.max(1.0)
}

/// Default equality tolerance between prizes.
pub const DEFAULT_EQ_TOLERANCE: f64 = 1e-9;

/// True iff every prize is non-negative and the prizes add up to the
/// endowment within `tau_sum`.
pub fn validate_allocation(
    competition: &Competition,
    allocation: &Allocation,
    tau_sum: f64,
) -> Result<bool, ModelError> {
    let ranking = competition.ranking();
    if allocation.entries().len() != ranking.len()
        || allocation
            .entries()
            .iter()
            .any(|(id, _)| !ranking.contains(id))
    {
        return Err(ModelError::KeyMismatch);
    }
    let non_negative = allocation.entries().iter().all(|(_, p)| *p >= 0.0);
    Ok(non_negative && (allocation.total() - competition.endowment()).abs() <= tau_sum)
}

/// Observed position→prize data of one event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrizeTable {
    pub name: String,
    pub endowment: f64,
    pub prizes: Vec<f64>,
}

impl PrizeTable {
    pub fn new(
        name: impl Into<String>,
        endowment: f64,
        prizes: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let table = Self {
            name: name.into(),
            endowment,
            prizes,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: &str| ModelError::InvalidPrizeTable {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if !(self.endowment.is_finite() && self.endowment > 0.0) {
            return Err(bad("endowment must be positive"));
        }
        if self.prizes.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(bad("prizes must be finite and non-negative"));
        }
        let listed: f64 = self.prizes.iter().sum();
        if listed > self.endowment * (1.0 + 1e-12) {
            return Err(bad("listed prizes exceed the endowment"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.prizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prizes.is_empty()
    }

    /// Prizes as percentages of the endowment.
    pub fn shares(&self) -> Vec<f64> {
        self.prizes
            .iter()
            .map(|p| 100.0 * p / self.endowment)
            .collect()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.prizes.windows(2).all(|w| w[0] >= w[1])
    }
}

/// Events expected to follow one underlying rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSet {
    pub events: Vec<PrizeTable>,
}

impl EventSet {
    pub fn new(events: Vec<PrizeTable>) -> Result<Self, ModelError> {
        let set = Self { events };
        set.validate()?;
        Ok(set)
    }

    pub fn single(table: PrizeTable) -> Self {
        Self {
            events: vec![table],
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let Some(first) = self.events.first() else {
            return Ok(());
        };
        for e in &self.events {
            e.validate()?;
            if e.len() != first.len() {
                return Err(ModelError::InconsistentPositionCounts {
                    expected: first.len(),
                    found: e.len(),
                });
            }
        }
        Ok(())
    }

    pub fn positions(&self) -> usize {
        self.events.first().map_or(0, PrizeTable::len)
    }
}
