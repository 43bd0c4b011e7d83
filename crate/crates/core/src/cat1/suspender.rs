use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::contract;
use crate::metric::{ModelPoint, Prepared, PreparedSample, SampleSet, SpaceDescriptor};
use crate::pairs::{reduce_pairs, Extremum, PairPlan};
use crate::{Error, Result};

/// Measured value of one constraint against its bound; `slack = bound − value`
/// for upper bounds and `value − bound` for lower bounds, so positive means pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub constraint: String,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Everything needed to decide for which δ a candidate tuple is a suspender.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuspenderProfile {
    pub p_tuple: Vec<ModelPoint>,
    pub q_tuple: Vec<ModelPoint>,
    /// Per i, the sample maximum of d(p_i, z) + d(z, q_i).
    pub raw_sups: Vec<f64>,
    /// Per i, the sample minimum of the same sum.
    pub raw_infs: Vec<f64>,
    /// Distances between p_i / q_i and p_j / q_j for i ≠ j, labelled.
    pub cross: Vec<(String, f64)>,
    pub sample_mesh: f64,
}

impl SuspenderProfile {
    pub fn evaluate(
        space: &SpaceDescriptor,
        sample: &SampleSet,
        p: &[ModelPoint],
        q: &[ModelPoint],
    ) -> Result<Self> {
        if p.is_empty() || p.len() != q.len() {
            return Err(contract("a suspender needs m ≥ 1 points and m opposites"));
        }
        if sample.is_empty() {
            return Err(contract("suspender evaluation needs a nonempty sample"));
        }
        let prep = PreparedSample::new(space, &sample.points)?;
        let pp = p
            .iter()
            .map(|x| prep.prepare(x))
            .collect::<Result<Vec<_>>>()?;
        let qq = q
            .iter()
            .map(|x| prep.prepare(x))
            .collect::<Result<Vec<_>>>()?;
        let mut raw_sups = Vec::with_capacity(p.len());
        let mut raw_infs = Vec::with_capacity(p.len());
        for (a, b) in pp.iter().zip(&qq) {
            let (lo, hi) = sum_range(&prep, a, b);
            raw_sups.push(hi);
            raw_infs.push(lo);
        }
        Ok(Self {
            p_tuple: p.to_vec(),
            q_tuple: q.to_vec(),
            raw_sups,
            raw_infs,
            cross: cross_distances(&prep, &pp, &qq),
            sample_mesh: sample.mesh,
        })
    }

    pub fn m(&self) -> usize {
        self.p_tuple.len()
    }

    /// Sample suprema plus the 2·mesh Lipschitz correction: upper bounds for
    /// the suprema over the whole space.
    pub fn corrected_sups(&self) -> Vec<f64> {
        self.raw_sups
            .iter()
            .map(|s| s + 2.0 * self.sample_mesh)
            .collect()
    }

    /// Smallest δ such that every constraint holds with `≤ π + δ` and
    /// `≤ π/2 + δ`; the tuple certifies exactly the δ strictly above it.
    pub fn defect(&self) -> f64 {
        let sums = self.corrected_sups().into_iter().map(|s| s - PI);
        let cross = self.cross.iter().map(|(_, d)| d - FRAC_PI_2);
        sums.chain(cross).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn certify(&self, delta: f64) -> Option<SuspenderCertificate> {
        if !(delta > 0.0) || self.defect() >= delta {
            return None;
        }
        let mut residuals = Vec::new();
        for (i, s) in self.corrected_sups().iter().enumerate() {
            residuals.push(Residual {
                constraint: format!("sup sum {}", i + 1),
                value: *s,
                bound: PI + delta,
                slack: PI + delta - s,
            });
        }
        for (label, d) in &self.cross {
            residuals.push(Residual {
                constraint: label.clone(),
                value: *d,
                bound: FRAC_PI_2 + delta,
                slack: FRAC_PI_2 + delta - d,
            });
        }
        Some(SuspenderCertificate {
            m: self.m(),
            p_tuple: self.p_tuple.clone(),
            q_tuple: self.q_tuple.clone(),
            delta,
            residuals,
            sample_mesh: self.sample_mesh,
            raw_sups: self.raw_sups.clone(),
            corrected_sups: self.corrected_sups(),
            defect: self.defect(),
        })
    }
}

fn sum_range(prep: &PreparedSample, a: &Prepared, b: &Prepared) -> (f64, f64) {
    (0..prep.len())
        .map(|z| prep.dist_to(z, a) + prep.dist_to(z, b))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s), hi.max(s))
        })
}

fn cross_distances(prep: &PreparedSample, p: &[Prepared], q: &[Prepared]) -> Vec<(String, f64)> {
    let m = p.len();
    let mut out = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            out.push((
                format!("p{}-p{}", i + 1, j + 1),
                prep.dist_between(&p[i], &p[j]),
            ));
            out.push((
                format!("p{}-q{}", i + 1, j + 1),
                prep.dist_between(&p[i], &q[j]),
            ));
            out.push((
                format!("q{}-p{}", i + 1, j + 1),
                prep.dist_between(&q[i], &p[j]),
            ));
            out.push((
                format!("q{}-q{}", i + 1, j + 1),
                prep.dist_between(&q[i], &q[j]),
            ));
        }
    }
    out
}

/// A tuple with its opposites that passes the suspender constraints on a
/// sample with the mesh correction applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuspenderCertificate {
    pub m: usize,
    pub p_tuple: Vec<ModelPoint>,
    pub q_tuple: Vec<ModelPoint>,
    pub delta: f64,
    pub residuals: Vec<Residual>,
    pub sample_mesh: f64,
    pub raw_sups: Vec<f64>,
    pub corrected_sups: Vec<f64>,
    /// Smallest δ passing the checks; `delta` is strictly above it.
    pub defect: f64,
}

/// Certifies a given tuple at `delta`, or returns `None` when some
/// constraint fails.
pub fn certify_suspender(
    space: &SpaceDescriptor,
    sample: &SampleSet,
    p: &[ModelPoint],
    q: &[ModelPoint],
    delta: f64,
) -> Result<Option<SuspenderCertificate>> {
    Ok(SuspenderProfile::evaluate(space, sample, p, q)?.certify(delta))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConclusionReport {
    /// Per i, the sample infimum of d(p_i, z) + d(z, q_i).
    pub sum_infs: Vec<f64>,
    /// The infima must exceed this: π − δ − 2·mesh.
    pub sum_bound: f64,
    pub min_sum_slack: f64,
    pub min_cross: f64,
    /// Cross distances must exceed this: π/2 − 2δ.
    pub cross_bound: f64,
    pub min_cross_slack: f64,
    pub passed: bool,
}

/// Checks the two consequences of the suspender definition: the sums stay
/// above π − δ and the cross distances above π/2 − 2δ.
pub fn verify_suspender_conclusions(
    cert: &SuspenderCertificate,
    space: &SpaceDescriptor,
    sample: &SampleSet,
) -> Result<ConclusionReport> {
    let profile = SuspenderProfile::evaluate(space, sample, &cert.p_tuple, &cert.q_tuple)?;
    let delta = cert.delta;
    let sum_bound = PI - delta - 2.0 * sample.mesh;
    let min_inf = profile
        .raw_infs
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let cross_bound = FRAC_PI_2 - 2.0 * delta;
    let min_cross = profile
        .cross
        .iter()
        .map(|(_, d)| *d)
        .fold(f64::INFINITY, f64::min);
    let min_sum_slack = min_inf - sum_bound;
    let min_cross_slack = if profile.cross.is_empty() {
        f64::INFINITY
    } else {
        min_cross - cross_bound
    };
    Ok(ConclusionReport {
        sum_infs: profile.raw_infs,
        sum_bound,
        min_sum_slack,
        min_cross,
        cross_bound,
        min_cross_slack,
        passed: min_sum_slack > 0.0 && min_cross_slack > 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    /// min over the sample of max_i |d(p_i, z) − π/2|.
    pub sample_gap: f64,
    /// Lower bound for the same minimum over the whole space.
    pub certified_lower: f64,
    pub attained_at: ModelPoint,
}

/// How far the sample stays from being simultaneously orthogonal to every
/// p_i of a full-order suspender.
pub fn fullsusp_gap(
    space: &SpaceDescriptor,
    sample: &SampleSet,
    cert: &SuspenderCertificate,
) -> Result<GapReport> {
    let prep = PreparedSample::new(space, &sample.points)?;
    if prep.is_empty() {
        return Err(contract("gap needs a nonempty sample"));
    }
    let ps = cert
        .p_tuple
        .iter()
        .map(|p| prep.prepare(p))
        .collect::<Result<Vec<_>>>()?;
    let (gap, at) = (0..prep.len())
        .map(|z| {
            let g = ps
                .iter()
                .map(|p| (prep.dist_to(z, p) - FRAC_PI_2).abs())
                .fold(0.0, f64::max);
            (g, z)
        })
        .fold(
            (f64::INFINITY, 0),
            |best, cur| if cur.0 < best.0 { cur } else { best },
        );
    Ok(GapReport {
        sample_gap: gap,
        certified_lower: (gap - sample.mesh).max(0.0),
        attained_at: sample.points[at].clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AperpReport {
    pub residual: f64,
    pub qualifying_pairs: usize,
    pub worst_pair: Option<(ModelPoint, ModelPoint)>,
}

/// Largest |Σ_i cos d(p_i, z₁) cos d(p_i, z₂)| over sample pairs that are
/// within δ of orthogonal.
pub fn aperp_check(
    space: &SpaceDescriptor,
    sample: &SampleSet,
    cert: &SuspenderCertificate,
    delta: f64,
) -> Result<AperpReport> {
    let prep = PreparedSample::new(space, &sample.points)?;
    let ps = cert
        .p_tuple
        .iter()
        .map(|p| prep.prepare(p))
        .collect::<Result<Vec<_>>>()?;
    let cosines: Vec<Vec<f64>> = (0..prep.len())
        .map(|z| ps.iter().map(|p| prep.dist_to(z, p).cos()).collect())
        .collect();
    let (worst, count) = reduce_pairs(
        prep.len(),
        PairPlan::All,
        (Extremum::max_identity(), 0usize),
        |i, j| {
            if (prep.dist(i, j) - FRAC_PI_2).abs() < delta {
                let s: f64 = cosines[i].iter().zip(&cosines[j]).map(|(a, b)| a * b).sum();
                (Extremum::at(s.abs(), i, j), 1)
            } else {
                (Extremum::max_identity(), 0)
            }
        },
        |a, b| (Extremum::max(a.0, b.0), a.1 + b.1),
    );
    let Some((i, j)) = worst.pair else {
        return Err(Error::EmptyDomain(
            "no sample pair within δ of orthogonal".into(),
        ));
    };
    Ok(AperpReport {
        residual: worst.value,
        qualifying_pairs: count,
        worst_pair: Some((sample.points[i].clone(), sample.points[j].clone())),
    })
}
