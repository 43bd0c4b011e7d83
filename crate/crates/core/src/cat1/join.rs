use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::contract;
use crate::metric::{ModelPoint, PreparedSample, SampleSet, SpaceDescriptor};
use crate::pairs::{reduce_pairs, Extremum, PairPlan};
use crate::Result;

/// Tolerance for calling a suspender exact on a sample.
const EXACT_TOL: f64 = 1e-9;

/// Checks that the tuple is an exact suspender on the sample: every sum
/// d(p_i, z) + d(z, q_i) equals π and all cross distances equal π/2, to 1e-9.
/// Returns the largest deviation.
pub fn check_exact_suspender(
    space: &SpaceDescriptor,
    sample: &SampleSet,
    p: &[ModelPoint],
    q: &[ModelPoint],
) -> Result<f64> {
    if p.is_empty() || p.len() != q.len() {
        return Err(contract("a suspender needs m ≥ 1 points and m opposites"));
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
    let mut worst: f64 = 0.0;
    for (a, b) in pp.iter().zip(&qq) {
        for z in 0..prep.len() {
            worst = worst.max((prep.dist_to(z, a) + prep.dist_to(z, b) - PI).abs());
        }
    }
    let all: Vec<_> = pp.iter().chain(&qq).collect();
    let m = p.len();
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            if j == i + m {
                continue;
            }
            worst = worst.max((prep.dist_between(all[i], all[j]) - FRAC_PI_2).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JoinReport {
    /// Largest |d(z₁, z₂) − join formula| over sample pairs.
    pub residual: f64,
    /// Number of sample points found in the polar set of the suspender.
    pub polar_points: usize,
    pub pairs_checked: usize,
    pub worst_pair: Option<(ModelPoint, ModelPoint)>,
}

/// Compares sample distances with the spherical-join formula induced by an
/// exact suspender. A point z splits as (c, w) with c_i = cos d(p_i, z) and w
/// its nearest point in the polar set C⊥; then
/// cos d(z, z') = Σ c_i c'_i + cos d(z, w) cos d(z', w') cos d(w, w').
pub fn verify_join_splitting(
    space: &SpaceDescriptor,
    sample: &SampleSet,
    p: &[ModelPoint],
    q: &[ModelPoint],
) -> Result<JoinReport> {
    let deviation = check_exact_suspender(space, sample, p, q)?;
    if deviation > EXACT_TOL {
        return Err(contract(format!(
            "tuple is not an exact suspender on the sample (deviation {deviation:e})"
        )));
    }
    let prep = PreparedSample::new(space, &sample.points)?;
    let anchors = p
        .iter()
        .chain(q)
        .map(|x| prep.prepare(x))
        .collect::<Result<Vec<_>>>()?;
    let n = prep.len();
    let polar: Vec<usize> = (0..n)
        .filter(|&z| {
            anchors
                .iter()
                .all(|a| (prep.dist_to(z, a) - FRAC_PI_2).abs() <= EXACT_TOL)
        })
        .collect();
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|z| {
            anchors[..p.len()]
                .iter()
                .map(|a| prep.dist_to(z, a).cos())
                .collect()
        })
        .collect();
    // Nearest polar point and the cosine of the distance to it.
    let foot: Vec<Option<(usize, f64)>> = (0..n)
        .map(|z| {
            polar
                .iter()
                .map(|&w| (w, prep.dist(z, w)))
                .min_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)))
                .map(|(w, d)| (w, d.cos()))
        })
        .collect();
    if polar.is_empty() {
        let covered = coords
            .iter()
            .map(|c| c.iter().map(|x| x * x).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        if covered < 1.0 - 1e-6 {
            return Err(contract(
                "the polar set is nonempty but has no sample points; refine the sample",
            ));
        }
    }
    let worst = reduce_pairs(
        n,
        PairPlan::All,
        Extremum::max_identity(),
        |i, j| {
            // Angle between the join embeddings, from chord and antipodal chord.
            let (mut minus, mut plus) = (0.0, 0.0);
            for (a, b) in coords[i].iter().zip(&coords[j]) {
                minus += (a - b) * (a - b);
                plus += (a + b) * (a + b);
            }
            if let (Some((wi, ri)), Some((wj, rj))) = (foot[i], foot[j]) {
                let (h, k) = (0.5 * prep.dist(wi, wj)).sin_cos();
                let dr = (ri - rj) * (ri - rj);
                minus += dr + 4.0 * ri * rj * h * h;
                plus += dr + 4.0 * ri * rj * k * k;
            }
            let predicted = 2.0 * minus.sqrt().atan2(plus.sqrt());
            Extremum::at((prep.dist(i, j) - predicted).abs(), i, j)
        },
        Extremum::max,
    );
    Ok(JoinReport {
        residual: worst.value.max(0.0),
        polar_points: polar.len(),
        pairs_checked: crate::pairs::total_pairs(n),
        worst_pair: worst
            .pair
            .map(|(i, j)| (sample.points[i].clone(), sample.points[j].clone())),
    })
}
