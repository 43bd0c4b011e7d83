use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cone::Target;
use crate::error::contract;
use crate::metric::{
    sphere_angle, truncated_distance, ModelPoint, PreparedSample, SampleSet, SpaceDescriptor,
};
use crate::pairs::{reduce_pairs, PairPlan};
use crate::{Error, Result};

use super::{diff_norm, l2, openness_iteration, StrainerMap};

/// Pair budget for ratio scans; larger samples fall back to seeded random pairs.
pub const DEFAULT_PAIR_BUDGET: usize = 2_000_000;

/// Pairs closer than this many meshes are left out of lower-ratio and
/// injectivity scans.
const FLOOR_MESHES: f64 = 10.0;
const INJECTIVITY_TOL: f64 = 1e-9;
const NUMERIC_SLACK: f64 = 1e-9;
const PROBE_TOL: f64 = 1e-12;
const PROBE_MAX_ITER: usize = 200;

fn images(sm: &StrainerMap, sample: &SampleSet) -> Result<Vec<Vec<f64>>> {
    sample.points.par_iter().map(|p| sm.evaluate(p)).collect()
}

#[derive(Clone, Copy)]
struct Ratios {
    upper: f64,
    lower: f64,
    floor_pairs: usize,
}

impl Ratios {
    fn identity() -> Self {
        Ratios {
            upper: 0.0,
            lower: f64::INFINITY,
            floor_pairs: 0,
        }
    }

    fn combine(a: Self, b: Self) -> Self {
        Ratios {
            upper: a.upper.max(b.upper),
            lower: a.lower.min(b.lower),
            floor_pairs: a.floor_pairs + b.floor_pairs,
        }
    }
}

/// Image distance over source distance on planned pairs; the lower ratio
/// only counts pairs at least `floor` apart.
fn scan_ratios<D, I>(n: usize, plan: PairPlan, floor: f64, source: D, image: I) -> Ratios
where
    D: Fn(usize, usize) -> f64 + Sync,
    I: Fn(usize, usize) -> f64 + Sync,
{
    reduce_pairs(
        n,
        plan,
        Ratios::identity(),
        |i, j| {
            let d = source(i, j);
            if d <= 0.0 {
                return Ratios::identity();
            }
            let r = image(i, j) / d;
            Ratios {
                upper: r,
                lower: if d >= floor { r } else { f64::INFINITY },
                floor_pairs: usize::from(d >= floor),
            }
        },
        Ratios::combine,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    /// max ‖φ(x) − φ(y)‖ / d(x, y) over the scanned pairs.
    pub lip: f64,
    pub lip_pairs: usize,
    pub lip_exhaustive: bool,
    /// max d(x₀, y*) / ‖u₀‖ over the probes.
    pub open_c: f64,
    pub probes: usize,
    /// Largest contraction ratio seen in any probe.
    pub max_contraction: f64,
    /// The openness constant guaranteed by the strainer defect, 1/(1 − 2(m−1)δ) per ℓ¹ unit.
    pub open_bound: f64,
}

/// Lipschitz constant on sample pairs and openness constant on random
/// probes of the openness iteration.
pub fn lipschitz_and_open_constants(
    sm: &StrainerMap,
    sample: &SampleSet,
    probes: usize,
    pair_budget: usize,
    seed: u64,
) -> Result<RegularityReport> {
    if sample.len() < 2 {
        return Err(contract(
            "regularity estimates need at least two sample points",
        ));
    }
    let prep = PreparedSample::new(sm.cone(), &sample.points)?;
    let img = images(sm, sample)?;
    let plan = PairPlan::within_budget(prep.len(), pair_budget, seed);
    let lip = scan_ratios(
        prep.len(),
        plan,
        f64::INFINITY,
        |i, j| prep.dist(i, j),
        |i, j| diff_norm(&img[i], &img[j]),
    )
    .upper;

    let m = sm.m();
    let model = sm.model()?;
    let runs: Vec<(f64, f64)> = (0..probes)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64 + 1);
            let x0 = &sample.points[rng.gen_range(0..sample.len())];
            let u0 = random_offset(&mut rng, m, 0.05, 0.5);
            let (y, trace) = openness_iteration(sm, x0, &u0, PROBE_TOL, PROBE_MAX_ITER)?;
            Ok((model.distance(x0, &y)? / l2(&u0), trace.max_ratio()))
        })
        .collect::<Result<_>>()?;
    let open_c = runs.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_contraction = runs.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(RegularityReport {
        lip,
        lip_pairs: plan.pair_count(prep.len()),
        lip_exhaustive: plan.is_exhaustive(),
        open_c,
        probes,
        max_contraction,
        open_bound: 1.0 / (1.0 - 2.0 * (m as f64 - 1.0) * sm.delta()),
    })
}

/// Uniform direction in ℝ^m scaled to a length uniform in [lo, hi].
fn random_offset(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = l2(&v);
        if n > 1e-3 && n <= 1.0 {
            let r = rng.gen_range(lo..hi);
            return v.iter().map(|x| x * r / n).collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilipReport {
    pub lower: f64,
    pub upper: f64,
    pub injectivity_violations: usize,
    /// Separation floor for the lower ratio and injectivity scans.
    pub floor: f64,
    pub pairs_checked: usize,
    pub floor_pairs: usize,
    pub exhaustive: bool,
}

/// Distortion of the strainer map on sample pairs, and an exhaustive count
/// of well-separated pairs with (numerically) equal images.
pub fn bilipschitz_verify(
    sm: &StrainerMap,
    sample: &SampleSet,
    pair_budget: usize,
    seed: u64,
) -> Result<BilipReport> {
    if sample.len() < 2 {
        return Err(contract("distortion needs at least two sample points"));
    }
    let prep = PreparedSample::new(sm.cone(), &sample.points)?;
    let img = images(sm, sample)?;
    let floor = FLOOR_MESHES * sample.mesh;
    let plan = PairPlan::within_budget(prep.len(), pair_budget, seed);
    let r = scan_ratios(
        prep.len(),
        plan,
        floor,
        |i, j| prep.dist(i, j),
        |i, j| diff_norm(&img[i], &img[j]),
    );
    Ok(BilipReport {
        lower: r.lower,
        upper: r.upper,
        injectivity_violations: collisions(&img, |i, j| prep.dist(i, j) >= floor),
        floor,
        pairs_checked: plan.pair_count(prep.len()),
        floor_pairs: r.floor_pairs,
        exhaustive: plan.is_exhaustive(),
    })
}

/// Pairs with images within the injectivity tolerance, found by bucketing
/// images into cells of that size and comparing neighbouring cells.
fn collisions<F: Fn(usize, usize) -> bool>(img: &[Vec<f64>], separated: F) -> usize {
    let cell = |v: &[f64]| -> Vec<i64> {
        v.iter()
            .map(|x| (x / INJECTIVITY_TOL).floor() as i64)
            .collect()
    };
    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, v) in img.iter().enumerate() {
        grid.entry(cell(v)).or_default().push(i);
    }
    let m = img.first().map_or(0, Vec::len);
    let mut count = 0;
    for (i, v) in img.iter().enumerate() {
        let home = cell(v);
        for code in 0..3usize.pow(m as u32) {
            let mut key = home.clone();
            let mut c = code;
            for k in key.iter_mut() {
                *k += (c % 3) as i64 - 1;
                c /= 3;
            }
            let Some(bucket) = grid.get(&key) else {
                continue;
            };
            count += bucket
                .iter()
                .filter(|&&j| j > i && diff_norm(v, &img[j]) <= INJECTIVITY_TOL && separated(i, j))
                .count();
        }
    }
    count
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereMapReport {
    pub lower: f64,
    pub upper: f64,
    /// Smallest ‖φ₀(z)‖ over the sample.
    pub min_norm: f64,
    pub pairs_checked: usize,
    pub exhaustive: bool,
}

/// Distortion of z ↦ φ₀(z)/‖φ₀(z)‖, with φ₀(z) = (−cos θ_i(z))_i and
/// θ_i = (d ∧ π)(ξ_i, z), from the base into the unit sphere. Image
/// distances are compared with min(d_Z, π).
pub fn sphere_map_distortion(
    base: &SpaceDescriptor,
    xi: &[ModelPoint],
    sample: &SampleSet,
    pair_budget: usize,
    seed: u64,
) -> Result<SphereMapReport> {
    if xi.len() < 2 {
        return Err(contract(
            "the sphere map needs a strainer of order at least 2",
        ));
    }
    if sample.len() < 2 {
        return Err(contract("distortion needs at least two sample points"));
    }
    let xi = xi
        .iter()
        .map(|x| base.normalize(x))
        .collect::<Result<Vec<_>>>()?;
    let mut unit = Vec::with_capacity(sample.len());
    let mut min_norm = f64::INFINITY;
    for z in &sample.points {
        let v = xi
            .iter()
            .map(|x| truncated_distance(base, x, z).map(|t| -t.cos()))
            .collect::<Result<Vec<_>>>()?;
        let n = l2(&v);
        if n <= INJECTIVITY_TOL {
            return Err(Error::Normalization {
                point: z.clone(),
                norm: n,
            });
        }
        min_norm = min_norm.min(n);
        unit.push(v.iter().map(|x| x / n).collect::<Vec<_>>());
    }
    let prep = PreparedSample::new(base, &sample.points)?;
    let plan = PairPlan::within_budget(prep.len(), pair_budget, seed);
    let r = scan_ratios(
        prep.len(),
        plan,
        0.0,
        |i, j| prep.dist(i, j).min(std::f64::consts::PI),
        |i, j| sphere_angle(&unit[i], &unit[j]),
    );
    Ok(SphereMapReport {
        lower: r.lower,
        upper: r.upper,
        min_norm,
        pairs_checked: plan.pair_count(prep.len()),
        exhaustive: plan.is_exhaustive(),
    })
}

/// `count` pairs of distinct sample points, drawn with a seeded generator.
pub fn random_geodesics(
    space: &SpaceDescriptor,
    sample: &SampleSet,
    count: usize,
    seed: u64,
) -> Result<Vec<(ModelPoint, ModelPoint)>> {
    if sample.len() < 2 {
        return Err(contract("need at least two sample points"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = &sample.points[rng.gen_range(0..sample.len())];
        let b = &sample.points[rng.gen_range(0..sample.len())];
        if crate::metric::distance(space, a, b)? > 1e-6 {
            out.push((a.clone(), b.clone()));
        }
    }
    Ok(out)
}

/// Geodesics whose endpoints have equal images, built by running the
/// openness iteration from a random start onto the image of a random point.
/// Attempts that end near the first endpoint are dropped, so maps that are
/// locally injective yield few or none.
pub fn equal_endpoint_geodesics(
    sm: &StrainerMap,
    sample: &SampleSet,
    attempts: usize,
    seed: u64,
) -> Result<Vec<(ModelPoint, ModelPoint)>> {
    if sample.is_empty() {
        return Err(contract("need a nonempty sample"));
    }
    let model = sm.model()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..attempts {
        let x = &sample.points[rng.gen_range(0..sample.len())];
        let y0 = &sample.points[rng.gen_range(0..sample.len())];
        let u: Vec<f64> = sm
            .evaluate(x)?
            .iter()
            .zip(sm.evaluate(y0)?)
            .map(|(a, b)| a - b)
            .collect();
        let Ok((y, _)) = openness_iteration(sm, y0, &u, PROBE_TOL, PROBE_MAX_ITER) else {
            continue;
        };
        if model.distance(x, &y)? > 1e-3 {
            out.push((x.clone(), y));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstVariationSuite {
    pub geodesics: usize,
    /// max |chord slope − right derivative| over coordinates and parameters.
    pub max_coordinate_residual: f64,
    pub coordinate_bound: f64,
    pub max_norm_residual: f64,
    pub norm_bound: f64,
    /// max ‖(φ∘γ)′₊(s) − (φ∘γ)′₊(t)‖ along a geodesic.
    pub max_variation: f64,
    pub variation_bound: f64,
    pub equal_endpoint_geodesics: usize,
    pub max_equal_endpoint_derivative: f64,
    pub equal_endpoint_bound: f64,
    pub violations: usize,
}

impl FirstVariationSuite {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// First variation inequalities for the map along the given geodesics,
/// sampled at `steps` parameters each.
///
/// Right derivatives come from the first variation formula
/// (b∘γ)′₊(s) = −cos ∠_{γ(s)}(ξ, γ(ℓ)); the chord slope at parameter s is
/// taken over the remaining piece γ([s, ℓ]). A geodesic through the apex is
/// covered on both legs since every parameter is evaluated separately.
pub fn first_variation_inequalities_check(
    sm: &StrainerMap,
    geodesics: &[(ModelPoint, ModelPoint)],
    steps: usize,
) -> Result<FirstVariationSuite> {
    if steps == 0 {
        return Err(contract("need at least one parameter per geodesic"));
    }
    let model = sm.model()?;
    let m = sm.m();
    let delta = sm.delta();
    let rm = (m as f64).sqrt();
    let coordinate_bound = 2.0 * delta;
    let norm_bound = 2.0 * rm * delta;
    let variation_bound = 4.0 * rm * delta;
    let equal_endpoint_bound = 6.0 * rm * delta;

    #[derive(Default)]
    struct Acc {
        geodesics: usize,
        coord: f64,
        norm: f64,
        variation: f64,
        equal: usize,
        equal_max: f64,
        violations: usize,
    }
    let per_geodesic = |(x, y): &(ModelPoint, ModelPoint)| -> Result<Acc> {
        let mut acc = Acc::default();
        let len = model.distance(x, y)?;
        if len <= 1e-9 {
            return Ok(acc);
        }
        acc.geodesics = 1;
        let end = sm.evaluate(y)?;
        let mut derivs = Vec::with_capacity(steps);
        for k in 0..steps {
            let s = len * k as f64 / steps as f64;
            let p = if k == 0 {
                x.clone()
            } else {
                model.geodesic_point(x, y, s)?
            };
            let d = sm
                .xi()
                .iter()
                .map(|xi| {
                    model
                        .angle_at(&p, Target::Ideal(xi), Target::Point(y))
                        .map(|a| -a.cos())
                })
                .collect::<Result<Vec<_>>>()?;
            let here = sm.evaluate(&p)?;
            let rest = len - s;
            let gaps: Vec<f64> = (0..m).map(|i| (end[i] - here[i]) / rest - d[i]).collect();
            let worst = gaps.iter().map(|g| g.abs()).fold(0.0, f64::max);
            acc.coord = acc.coord.max(worst);
            acc.norm = acc.norm.max(l2(&gaps));
            acc.violations += usize::from(worst > coordinate_bound + NUMERIC_SLACK);
            acc.violations += usize::from(l2(&gaps) > norm_bound + NUMERIC_SLACK);
            derivs.push(d);
        }
        for a in 0..derivs.len() {
            for b in (a + 1)..derivs.len() {
                let v = diff_norm(&derivs[a], &derivs[b]);
                acc.variation = acc.variation.max(v);
                acc.violations += usize::from(v > variation_bound + NUMERIC_SLACK);
            }
        }
        if diff_norm(&sm.evaluate(x)?, &end) <= 1e-9 {
            acc.equal = 1;
            for d in &derivs {
                acc.equal_max = acc.equal_max.max(l2(d));
                acc.violations += usize::from(l2(d) > equal_endpoint_bound + NUMERIC_SLACK);
            }
        }
        Ok(acc)
    };
    let parts = geodesics
        .par_iter()
        .map(per_geodesic)
        .collect::<Result<Vec<_>>>()?;
    let total = parts.into_iter().fold(Acc::default(), |a, b| Acc {
        geodesics: a.geodesics + b.geodesics,
        coord: a.coord.max(b.coord),
        norm: a.norm.max(b.norm),
        variation: a.variation.max(b.variation),
        equal: a.equal + b.equal,
        equal_max: a.equal_max.max(b.equal_max),
        violations: a.violations + b.violations,
    });
    Ok(FirstVariationSuite {
        geodesics: total.geodesics,
        max_coordinate_residual: total.coord,
        coordinate_bound,
        max_norm_residual: total.norm,
        norm_bound,
        max_variation: total.variation,
        variation_bound,
        equal_endpoint_geodesics: total.equal,
        max_equal_endpoint_derivative: total.equal_max,
        equal_endpoint_bound,
        violations: total.violations,
    })
}
