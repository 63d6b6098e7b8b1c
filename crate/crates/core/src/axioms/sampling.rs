use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConsistencyMode, SampleBudget};
use crate::model::{CompetitorId, Ranking};

const GRID_STEP: f64 = 0.25;
const GRID_MAX: f64 = 10.0;
const GRID_DRAWS: usize = 50;
const EXHAUSTIVE_SUBSETS_UP_TO: usize = 6;
const RANDOM_SUBSETS: usize = 64;
const EXHAUSTIVE_ORDERINGS_UP_TO: usize = 3;

/// `0, 0.25, …, 10` plus 50 uniform draws in `[0, 10]`, sorted.
pub fn default_grid(seed: u64) -> Vec<f64> {
    let steps = (GRID_MAX / GRID_STEP) as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|k| k as f64 * GRID_STEP).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grid.extend((0..GRID_DRAWS).map(|_| rng.random_range(0.0..=GRID_MAX)));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Rankings in sample order: competitor counts ascending; for each count the
/// canonical ranking `c1 > … > cn` first, then the other orderings of
/// `c1 … cn` (all of them up to three competitors, only the reversal above),
/// then `rankings_per_n` random draws from the pool `c1 … c(max_n + 2)`.
pub(crate) fn sample_rankings(budget: &SampleBudget) -> Vec<Ranking> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.rng_seed);
    let pool: Vec<CompetitorId> = (1..=budget.max_n + 2).map(CompetitorId::indexed).collect();
    let mut out = Vec::new();
    for n in 1..=budget.max_n {
        let canonical = Ranking::canonical(n);
        let ids = canonical.order().to_vec();
        out.push(canonical);
        if n <= EXHAUSTIVE_ORDERINGS_UP_TO {
            for perm in permutations(n).into_iter().skip(1) {
                let order = perm.iter().map(|&k| ids[k].clone()).collect();
                out.push(Ranking::from_order(order).expect("permutation of distinct ids"));
            }
        } else {
            let reversed = ids.iter().rev().cloned().collect();
            out.push(Ranking::from_order(reversed).expect("permutation of distinct ids"));
        }
        for _ in 0..budget.rankings_per_n {
            let mut ids = pool.clone();
            let (chosen, _) = ids.partial_shuffle(&mut rng, n);
            out.push(Ranking::from_order(chosen.to_vec()).expect("distinct pool ids"));
        }
    }
    out
}

/// Permutations of `0..n` in lexicographic order, identity first.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|k| if k >= first { k + 1 } else { k }));
            out.push(p);
        }
    }
    out
}

/// Whether the positions (1-based, ascending) of `S` qualify for `mode`.
pub(crate) fn qualifies(positions: &[usize], mode: ConsistencyMode, pair_only: bool) -> bool {
    if positions.is_empty() || (pair_only && positions.len() != 2) {
        return false;
    }
    match mode {
        ConsistencyMode::Full => true,
        ConsistencyMode::Bilateral => positions.len() == 2,
        ConsistencyMode::Local => positions.windows(2).all(|w| w[1] == w[0] + 1),
        ConsistencyMode::Top => positions[0] == 1 && positions.windows(2).all(|w| w[1] == w[0] + 1),
    }
}

/// Position sets to test for a competition of size `n`, ordered by size and
/// then lexicographically. Exhaustive up to six competitors, random above.
pub(crate) fn subsets(
    n: usize,
    mode: ConsistencyMode,
    pair_only: bool,
    seed: u64,
) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = if n <= EXHAUSTIVE_SUBSETS_UP_TO {
        (1u32..(1 << n))
            .map(|mask| (1..=n).filter(|p| mask & (1 << (p - 1)) != 0).collect())
            .collect()
    } else {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut draws: Vec<Vec<usize>> = (0..RANDOM_SUBSETS)
            .map(|_| {
                let mut s: Vec<usize> = (1..=n).filter(|_| rng.random_bool(0.5)).collect();
                if s.is_empty() {
                    s.push(rng.random_range(1..=n));
                }
                s
            })
            .collect();
        // structured subsets so every mode has candidates
        for len in 1..=n {
            for start in 1..=n + 1 - len {
                draws.push((start..start + len).collect());
            }
        }
        draws
    };
    out.retain(|s| qualifies(s, mode, pair_only));
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out.dedup();
    out
}
