//! Pair scans over samples with deterministic reductions.
//!
//! Scans fan out over rayon's pool. Every reduction used here (max, min,
//! counts, lexicographic argmax) is order-independent, so results do not
//! depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

const CHUNK: usize = 1 << 16;

/// Which unordered pairs `{i, j}` (i < j) of an `n`-point sample to visit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PairPlan {
    All,
    /// `count` pairs drawn uniformly with a seeded generator.
    Random {
        count: usize,
        seed: u64,
    },
}

impl PairPlan {
    /// Every pair when there are at most `budget` of them, otherwise a
    /// seeded random subset of size `budget`.
    pub fn within_budget(n: usize, budget: usize, seed: u64) -> Self {
        if total_pairs(n) <= budget {
            PairPlan::All
        } else {
            PairPlan::Random {
                count: budget,
                seed,
            }
        }
    }

    pub fn pair_count(&self, n: usize) -> usize {
        match self {
            PairPlan::All => total_pairs(n),
            PairPlan::Random { count, .. } => *count,
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self, PairPlan::All)
    }
}

pub fn total_pairs(n: usize) -> usize {
    n.saturating_mul(n.saturating_sub(1)) / 2
}

/// Maps every planned pair through `map` and folds the results with the
/// associative, commutative `combine`.
pub fn reduce_pairs<T, M, C>(n: usize, plan: PairPlan, identity: T, map: M, combine: C) -> T
where
    T: Send + Sync + Clone,
    M: Fn(usize, usize) -> T + Sync,
    C: Fn(T, T) -> T + Sync + Send,
{
    if n < 2 {
        return identity;
    }
    match plan {
        PairPlan::All => (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = identity.clone();
                for j in (i + 1)..n {
                    acc = combine(acc, map(i, j));
                }
                acc
            })
            .reduce(|| identity.clone(), &combine),
        PairPlan::Random { count, seed } => {
            let chunks = count.div_ceil(CHUNK);
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c as u64);
                    let len = CHUNK.min(count - c * CHUNK);
                    let mut acc = identity.clone();
                    for _ in 0..len {
                        let i = rng.gen_range(0..n);
                        let mut j = rng.gen_range(0..n - 1);
                        if j >= i {
                            j += 1;
                        }
                        let (a, b) = if i < j { (i, j) } else { (j, i) };
                        acc = combine(acc, map(a, b));
                    }
                    acc
                })
                .reduce(|| identity.clone(), &combine)
        }
    }
}

/// Largest value of `f` over all pairs.
pub fn max_over_pairs<F>(n: usize, f: F) -> f64
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    reduce_pairs(n, PairPlan::All, f64::NEG_INFINITY, f, f64::max)
}

/// Running extremum that remembers the lexicographically first pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub value: f64,
    pub pair: Option<(usize, usize)>,
}

impl Extremum {
    pub fn max_identity() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            pair: None,
        }
    }

    pub fn min_identity() -> Self {
        Self {
            value: f64::INFINITY,
            pair: None,
        }
    }

    pub fn at(value: f64, i: usize, j: usize) -> Self {
        Self {
            value,
            pair: Some((i, j)),
        }
    }

    pub fn max(a: Self, b: Self) -> Self {
        match a.value.partial_cmp(&b.value) {
            Some(std::cmp::Ordering::Greater) => a,
            Some(std::cmp::Ordering::Less) => b,
            _ => Self::earlier(a, b),
        }
    }

    pub fn min(a: Self, b: Self) -> Self {
        match a.value.partial_cmp(&b.value) {
            Some(std::cmp::Ordering::Less) => a,
            Some(std::cmp::Ordering::Greater) => b,
            _ => Self::earlier(a, b),
        }
    }

    fn earlier(a: Self, b: Self) -> Self {
        match (a.pair, b.pair) {
            (Some(x), Some(y)) if y < x => b,
            (None, Some(_)) => b,
            _ => a,
        }
    }
}
