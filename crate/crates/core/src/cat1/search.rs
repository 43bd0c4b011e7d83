//! Exhaustive suspender search over a sample.
//!
//! Candidate tuples are enumerated as cliques of index pairs `(a, b)`,
//! `a < b`, with first indices strictly increasing, which covers every tuple
//! up to reordering. Pruning only discards what cannot certify:
//!
//! * a pair needs d(p, q) within δ of π (the sum at z = p is d(p, q), and
//!   the sum never drops below π − δ on a suspender);
//! * a pair is dropped when the sum at the sample point farthest from either
//!   member already reaches π + δ − 2·mesh;
//! * two pairs are compatible only when all four cross distances lie in
//!   (π/2 − 2δ, π/2 + δ).
//!
//! The full supremum test of a pair runs once, the first time the pair is
//! reached, and failing pairs are dropped from every neighbor list. The
//! first clique in lexicographic order that certifies is returned.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::contract;
use crate::metric::{ModelPoint, PreparedSample, SampleSet, SpaceDescriptor, VpTree};
use crate::{Error, Result};

use super::suspender::{SuspenderCertificate, SuspenderProfile};

/// Default node budget for one search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 50_000_000;

/// Rounding slack applied to pruning windows so that they never discard a
/// tuple the exact checks would accept.
const FUZZ: f64 = 1e-12;

/// Search state for one (space, sample, δ); caches are shared across orders.
pub struct SuspenderSearch<'a> {
    space: &'a SpaceDescriptor,
    sample: &'a SampleSet,
    prep: PreparedSample<'a>,
    tree: VpTree,
    delta: f64,
    pairs: Vec<(usize, usize)>,
    by_member: Vec<Vec<usize>>,
    neighbors: HashMap<usize, Vec<usize>>,
    sup_ok: HashMap<usize, bool>,
    budget: u64,
    used: u64,
    deepest: Vec<usize>,
}

impl<'a> SuspenderSearch<'a> {
    pub fn new(
        space: &'a SpaceDescriptor,
        sample: &'a SampleSet,
        delta: f64,
        budget: u64,
    ) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(contract("suspender defect must be positive"));
        }
        let report = super::admits_cat1(space)?;
        if !report.admissible {
            return Err(contract("suspender search needs a CAT(1) model"));
        }
        if sample.is_empty() {
            return Err(contract("suspender search needs a nonempty sample"));
        }
        let prep = PreparedSample::new(space, &sample.points)?;
        let n = prep.len();
        let tree = VpTree::build(n, |i, j| prep.dist(i, j));

        let mut anti: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut farthest: Vec<Option<usize>> = Vec::with_capacity(n);
        let mut buf = Vec::new();
        for i in 0..n {
            buf.clear();
            tree.band(
                |j| prep.dist(i, j),
                PI - delta - FUZZ,
                f64::INFINITY,
                &mut buf,
            );
            let far = buf
                .iter()
                .copied()
                .max_by(|&a, &b| prep.dist(i, a).total_cmp(&prep.dist(i, b)).then(b.cmp(&a)));
            farthest.push(far);
            anti.push(buf.clone());
        }

        let limit = PI + delta - 2.0 * sample.mesh;
        let mut pairs = Vec::new();
        for (a, list) in anti.iter().enumerate() {
            for &b in list.iter().filter(|&&b| b > a) {
                if prep.dist(a, b) > PI + delta + FUZZ {
                    continue;
                }
                let blocked = [farthest[a], farthest[b]]
                    .into_iter()
                    .flatten()
                    .any(|z| prep.dist(a, z) + prep.dist(z, b) >= limit);
                if !blocked {
                    pairs.push((a, b));
                }
            }
        }
        let mut by_member = vec![Vec::new(); n];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            by_member[a].push(k);
            by_member[b].push(k);
        }
        Ok(Self {
            space,
            sample,
            prep,
            tree,
            delta,
            pairs,
            by_member,
            neighbors: HashMap::new(),
            sup_ok: HashMap::new(),
            budget,
            used: 0,
            deepest: Vec::new(),
        })
    }

    /// Number of index pairs surviving the single-pair pruning.
    pub fn candidate_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Nodes visited so far, across all calls.
    pub fn nodes_used(&self) -> u64 {
        self.used
    }

    /// First certifying m-tuple in lexicographic order, or `None` when the
    /// exhaustive search finds none.
    pub fn find(&mut self, m: usize) -> Result<Option<SuspenderCertificate>> {
        if m == 0 {
            return Err(contract("suspender order must be at least 1"));
        }
        self.deepest.clear();
        let all: Vec<usize> = (0..self.pairs.len()).collect();
        let mut chosen = Vec::with_capacity(m);
        self.extend(&mut chosen, &all, m)
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.budget {
            let best_partial = self
                .deepest
                .iter()
                .map(|&k| {
                    let (a, b) = self.pairs[k];
                    (self.sample.points[a].clone(), self.sample.points[b].clone())
                })
                .collect();
            return Err(Error::Budget {
                budget: self.budget,
                best_partial,
            });
        }
        Ok(())
    }

    fn extend(
        &mut self,
        chosen: &mut Vec<usize>,
        cands: &[usize],
        m: usize,
    ) -> Result<Option<SuspenderCertificate>> {
        let need = m - chosen.len();
        for (idx, &v) in cands.iter().enumerate() {
            if cands.len() - idx < need {
                break;
            }
            self.tick()?;
            if !self.pair_sup_ok(v)? {
                continue;
            }
            chosen.push(v);
            if chosen.len() > self.deepest.len() {
                self.deepest = chosen.clone();
            }
            let found = if need == 1 {
                self.try_certify(chosen)?
            } else {
                let nv = self.neighbors_of(v)?;
                let next = intersect(&cands[idx + 1..], &nv);
                if next.len() + 1 >= need {
                    self.extend(chosen, &next, m)?
                } else {
                    None
                }
            };
            chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn try_certify(&mut self, chosen: &[usize]) -> Result<Option<SuspenderCertificate>> {
        for &k in chosen {
            if !self.pair_sup_ok(k)? {
                return Ok(None);
            }
        }
        let (p, q): (Vec<ModelPoint>, Vec<ModelPoint>) = chosen
            .iter()
            .map(|&k| {
                let (a, b) = self.pairs[k];
                (self.sample.points[a].clone(), self.sample.points[b].clone())
            })
            .unzip();
        let profile = SuspenderProfile::evaluate(self.space, self.sample, &p, &q)?;
        Ok(profile.certify(self.delta))
    }

    fn pair_sup_ok(&mut self, k: usize) -> Result<bool> {
        if let Some(&ok) = self.sup_ok.get(&k) {
            return Ok(ok);
        }
        self.tick()?;
        let (a, b) = self.pairs[k];
        let limit = PI + self.delta - 2.0 * self.sample.mesh;
        let ok = (0..self.prep.len()).all(|z| self.prep.dist(a, z) + self.prep.dist(z, b) < limit);
        self.sup_ok.insert(k, ok);
        Ok(ok)
    }

    /// Later pairs (in pair order) that pass the supremum test and all of
    /// whose cross distances with pair `u` lie in the orthogonality window.
    fn neighbors_of(&mut self, u: usize) -> Result<Vec<usize>> {
        if let Some(n) = self.neighbors.get(&u) {
            return Ok(n.clone());
        }
        let (a, b) = self.pairs[u];
        let lo = FRAC_PI_2 - 2.0 * self.delta - FUZZ;
        let hi = FRAC_PI_2 + self.delta + FUZZ;
        let prep = &self.prep;
        let mut near_a = Vec::new();
        self.tree.band(|j| prep.dist(a, j), lo, hi, &mut near_a);
        let window: Vec<usize> = near_a
            .into_iter()
            .filter(|&r| (lo..=hi).contains(&prep.dist(b, r)))
            .collect();
        let mut out = Vec::new();
        for &r in &window {
            for &v in &self.by_member[r] {
                if v <= u {
                    continue;
                }
                let (c, d) = self.pairs[v];
                let other = if c == r { d } else { c };
                if window.binary_search(&other).is_ok() {
                    out.push(v);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        let mut kept = Vec::with_capacity(out.len());
        for v in out {
            if self.pair_sup_ok(v)? {
                kept.push(v);
            }
        }
        self.neighbors.insert(u, kept.clone());
        Ok(kept)
    }
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// First certifying (m, δ)-suspender on the sample, or `None`.
pub fn find_suspender(
    space: &SpaceDescriptor,
    sample: &SampleSet,
    m: usize,
    delta: f64,
    budget: u64,
) -> Result<Option<SuspenderCertificate>> {
    SuspenderSearch::new(space, sample, delta, budget)?.find(m)
}

/// Outcome of [`max_suspender_order`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuspenderOrder {
    /// Largest m whose search certified a suspender within the budget.
    pub order: usize,
    pub certificate: Option<SuspenderCertificate>,
    /// True when the search at order + 1 finished and found nothing; false
    /// when it ran out of budget first.
    pub exhaustive: bool,
}

/// Largest m for which a certifying (m, δ)-suspender is found on the sample
/// within the node budget, shared across orders. Fails with a budget error
/// only when not even order 1 can be decided.
pub fn max_suspender_order(
    space: &SpaceDescriptor,
    sample: &SampleSet,
    delta: f64,
    budget: u64,
) -> Result<SuspenderOrder> {
    let mut search = SuspenderSearch::new(space, sample, delta, budget)?;
    let mut best = SuspenderOrder {
        order: 0,
        certificate: None,
        exhaustive: true,
    };
    for m in 1.. {
        match search.find(m) {
            Ok(Some(cert)) => {
                best.order = m;
                best.certificate = Some(cert);
            }
            Ok(None) => break,
            Err(Error::Budget { .. }) if m > 1 => {
                best.exhaustive = false;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}
