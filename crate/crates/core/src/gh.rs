//! Two-sided Gromov–Hausdorff estimates between compact model spaces.
//!
//! Upper bounds come from explicit correspondences, lower bounds from
//! diameter and three-point packing obstructions. Every value carries a
//! provenance string naming the engine that produced it.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cat1::admits_cat1;
use crate::error::contract;
use crate::metric::{
    diameter_bounds, distance, epsilon_net, ModelPoint, PreparedSample, SampleSet, SpaceDescriptor,
};
use crate::pairs::{reduce_pairs, total_pairs, Extremum, PairPlan};
use crate::{Error, Result};

/// Pair budget for sampled distortion scans.
pub const DEFAULT_GH_BUDGET: usize = 20_000_000;

/// Samples larger than this skip the cubic three-point packing obstruction.
const PACKING_MAX_POINTS: usize = 400;

/// Relation between two samples given by index pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
    /// max over pairs of pairs of |d_X(x, x') − d_Y(y, y')|.
    pub distortion: f64,
}

impl Correspondence {
    /// Validates coverage of both samples and computes the distortion over
    /// all pairs of pairs.
    pub fn new(
        x_space: &SpaceDescriptor,
        x_sample: &SampleSet,
        y_space: &SpaceDescriptor,
        y_sample: &SampleSet,
        pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let mut seen_x = vec![false; x_sample.len()];
        let mut seen_y = vec![false; y_sample.len()];
        for &(i, j) in &pairs {
            if i >= x_sample.len() || j >= y_sample.len() {
                return Err(contract("correspondence index out of range"));
            }
            seen_x[i] = true;
            seen_y[j] = true;
        }
        if !seen_x.iter().chain(&seen_y).all(|&s| s) {
            return Err(contract("a correspondence must cover both samples"));
        }
        let distortion = Self::measure(x_space, x_sample, y_space, y_sample, &pairs)?;
        Ok(Self { pairs, distortion })
    }

    fn measure(
        x_space: &SpaceDescriptor,
        x_sample: &SampleSet,
        y_space: &SpaceDescriptor,
        y_sample: &SampleSet,
        pairs: &[(usize, usize)],
    ) -> Result<f64> {
        let px = PreparedSample::new(x_space, &x_sample.points)?;
        let py = PreparedSample::new(y_space, &y_sample.points)?;
        Ok(reduce_pairs(
            pairs.len(),
            PairPlan::All,
            0.0,
            |a, b| {
                let (i, j) = pairs[a];
                let (k, l) = pairs[b];
                (px.dist(i, k) - py.dist(j, l)).abs()
            },
            f64::max,
        ))
    }

    /// Distortion recomputed from the pair list.
    pub fn recompute(
        &self,
        x_space: &SpaceDescriptor,
        x_sample: &SampleSet,
        y_space: &SpaceDescriptor,
        y_sample: &SampleSet,
    ) -> Result<f64> {
        Self::measure(x_space, x_sample, y_space, y_sample, &self.pairs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CApproxReport {
    pub passed: bool,
    pub distortion_ok: bool,
    /// max |d_Y(φ(x₁), φ(x₂)) − d_X(x₁, x₂)| over the map sample.
    pub worst_distortion: f64,
    pub worst_pair: Option<(ModelPoint, ModelPoint)>,
    pub covering_ok: bool,
    /// max over the Y sample of the distance to the image.
    pub worst_cover: f64,
    /// Radius used for the covering condition.
    pub covering_radius: f64,
    pub covering_note: String,
}

/// Checks that a sampled map is a c-approximation: additive distortion
/// below c on all pairs and image c-dense in the Y sample.
pub fn check_c_approximation(
    x_space: &SpaceDescriptor,
    y_space: &SpaceDescriptor,
    map: &[(ModelPoint, ModelPoint)],
    y_sample: &SampleSet,
    c: f64,
) -> Result<CApproxReport> {
    if map.is_empty() || y_sample.is_empty() {
        return Err(contract("c-approximation checks need nonempty samples"));
    }
    if !(c > 0.0) {
        return Err(contract("c must be positive"));
    }
    let xs: Vec<ModelPoint> = map.iter().map(|(x, _)| x.clone()).collect();
    let ys: Vec<ModelPoint> = map.iter().map(|(_, y)| y.clone()).collect();
    let px = PreparedSample::new(x_space, &xs)?;
    let py = PreparedSample::new(y_space, &ys)?;
    let worst = reduce_pairs(
        map.len(),
        PairPlan::All,
        Extremum::max_identity(),
        |i, j| Extremum::at((py.dist(i, j) - px.dist(i, j)).abs(), i, j),
        Extremum::max,
    );
    let worst_distortion = worst.value.max(0.0);
    let cover = y_sample
        .points
        .iter()
        .map(|y| {
            let q = py.prepare(y)?;
            Ok((0..py.len())
                .map(|k| py.dist_to(k, &q))
                .fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst_cover = cover.into_iter().fold(0.0, f64::max);
    let distortion_ok = worst_distortion < c;
    let covering_ok = worst_cover < c;
    Ok(CApproxReport {
        passed: distortion_ok && covering_ok,
        distortion_ok,
        worst_distortion,
        worst_pair: worst.pair.map(|(i, j)| (xs[i].clone(), xs[j].clone())),
        covering_ok,
        worst_cover,
        covering_radius: c,
        covering_note: "image balls of radius c must cover the target sample".into(),
    })
}

/// Correspondence families for upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Family {
    /// The registered family for the pair of spaces, or the greedy fallback.
    Auto,
    /// Circle to circle, angle ↦ angle·L_Y/L_X.
    CircleScaling,
    /// Suspension of a circle to a suspension of a circle (or 𝕊²), scaling
    /// the base and keeping the polar coordinate.
    SuspensionBaseScaling,
    /// Nearest-profile matching between samples under a seeded alignment.
    Greedy { budget: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    pub provenance: String,
}

/// Length of a space isometric to a circle.
fn circle_like(space: &SpaceDescriptor) -> Option<f64> {
    match space {
        SpaceDescriptor::Circle { length } => Some(*length),
        SpaceDescriptor::RoundSphere { dim: 1 } => Some(TAU),
        _ => None,
    }
}

fn circle_point(space: &SpaceDescriptor, angle: f64) -> Result<ModelPoint> {
    match space {
        SpaceDescriptor::RoundSphere { dim: 1 } => space.coords(vec![angle.cos(), angle.sin()]),
        _ => space.angle(angle),
    }
}

/// Base length of a space isometric to the suspension of a circle.
fn suspension_of_circle(space: &SpaceDescriptor) -> Option<f64> {
    match space {
        SpaceDescriptor::Suspension(b) => circle_like(b),
        SpaceDescriptor::RoundSphere { dim: 2 } => Some(TAU),
        _ => None,
    }
}

/// sup over d ∈ [0, L_X/2] of |min(d, π) − min(λd, π)|, λ = L_Y/L_X; the
/// difference is piecewise linear, so breakpoints suffice.
fn truncated_scaling_distortion(lx: f64, ly: f64) -> f64 {
    let lam = ly / lx;
    let g = |d: f64| (d.min(PI) - (lam * d).min(PI)).abs();
    [0.0, PI, PI / lam, 0.5 * lx]
        .into_iter()
        .filter(|&d| d <= 0.5 * lx)
        .map(g)
        .fold(0.0, f64::max)
}

/// Certified upper bound ½·distortion (+ sample correction) from a
/// correspondence family.
pub fn gh_upper_bound(
    x: &SpaceDescriptor,
    y: &SpaceDescriptor,
    family: Family,
    mesh: f64,
) -> Result<Bound> {
    if !x.is_compact() || !y.is_compact() {
        return Err(contract("GH bounds need compact spaces"));
    }
    if !(mesh > 0.0) {
        return Err(contract("mesh must be positive"));
    }
    let family = match family {
        Family::Auto if x == y => {
            return Ok(Bound {
                value: 0.0,
                provenance: "closed_form: identity correspondence".into(),
            })
        }
        Family::Auto if circle_like(x).is_some() && circle_like(y).is_some() => {
            Family::CircleScaling
        }
        Family::Auto if suspension_of_circle(x).is_some() && suspension_of_circle(y).is_some() => {
            Family::SuspensionBaseScaling
        }
        Family::Auto => Family::Greedy {
            budget: DEFAULT_GH_BUDGET,
            seed: 0,
        },
        f => f,
    };
    match family {
        Family::CircleScaling => circle_scaling_bound(x, y, mesh),
        Family::SuspensionBaseScaling => {
            let (Some(lx), Some(ly)) = (suspension_of_circle(x), suspension_of_circle(y)) else {
                return Err(Error::NoFamily(
                    "base scaling needs suspensions of circles".into(),
                ));
            };
            // The suspension law is 1-Lipschitz in the base angle with
            // equality on the equator, so the distortion is the base one.
            Ok(Bound {
                value: 0.5 * truncated_scaling_distortion(lx, ly),
                provenance: "closed_form: suspension base scaling, equator reduction".into(),
            })
        }
        Family::Greedy { budget, seed } => greedy_bound(x, y, mesh, budget, seed),
        Family::Auto => unreachable!("resolved above"),
    }
}

fn circle_scaling_bound(x: &SpaceDescriptor, y: &SpaceDescriptor, mesh: f64) -> Result<Bound> {
    let (Some(lx), Some(ly)) = (circle_like(x), circle_like(y)) else {
        return Err(Error::NoFamily("circle scaling needs two circles".into()));
    };
    let lam = ly / lx;
    let sample = epsilon_net(&SpaceDescriptor::circle(lx)?, None, mesh, 0)?;
    let angles: Vec<f64> = sample
        .points
        .iter()
        .map(|p| p.angle().expect("circle nets hold angles"))
        .collect();
    let images = angles
        .iter()
        .map(|&a| circle_point(y, lam * a))
        .collect::<Result<Vec<_>>>()?;
    let xs = SpaceDescriptor::circle(lx)?;
    let px = PreparedSample::new(&xs, &sample.points)?;
    let py = PreparedSample::new(y, &images)?;
    let sampled = reduce_pairs(
        px.len(),
        PairPlan::All,
        0.0,
        |i, j| (px.dist(i, j) - py.dist(i, j)).abs(),
        f64::max,
    );
    // On a circle the defect is |1 − λ|·d_X, which moves by at most
    // |1 − λ|·mesh when each endpoint moves by mesh.
    let value = 0.5 * sampled + (1.0 - lam).abs() * sample.mesh;
    Ok(Bound {
        value,
        provenance: format!(
            "sampled(mesh={}): circle scaling correspondence",
            sample.mesh
        ),
    })
}

/// Pairs every x with the y whose distance to a seeded anchor best matches
/// that of x to its anchor, and symmetrically.
fn greedy_bound(
    x: &SpaceDescriptor,
    y: &SpaceDescriptor,
    mesh: f64,
    budget: usize,
    seed: u64,
) -> Result<Bound> {
    let xs = epsilon_net(x, None, mesh, seed)?;
    let ys = epsilon_net(y, None, mesh, seed)?;
    let pair_count = xs.len() + ys.len();
    if total_pairs(pair_count) > budget {
        return Err(Error::NoFamily(format!(
            "no registered family and the greedy fallback needs {} pair checks (budget {budget})",
            total_pairs(pair_count)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ax = &xs.points[rng.gen_range(0..xs.len())];
    let ay = &ys.points[rng.gen_range(0..ys.len())];
    let prof_x = xs
        .points
        .iter()
        .map(|p| distance(x, ax, p))
        .collect::<Result<Vec<_>>>()?;
    let prof_y = ys
        .points
        .iter()
        .map(|p| distance(y, ay, p))
        .collect::<Result<Vec<_>>>()?;
    let nearest = |v: f64, prof: &[f64]| {
        prof.iter()
            .enumerate()
            .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
            .map(|(k, _)| k)
            .expect("nonempty sample")
    };
    let mut pairs: Vec<(usize, usize)> = (0..xs.len())
        .map(|i| (i, nearest(prof_x[i], &prof_y)))
        .collect();
    pairs.extend((0..ys.len()).map(|j| (nearest(prof_y[j], &prof_x), j)));
    pairs.sort_unstable();
    pairs.dedup();
    let corr = Correspondence::new(x, &xs, y, &ys, pairs)?;
    Ok(Bound {
        value: 0.5 * corr.distortion + xs.mesh + ys.mesh,
        provenance: format!(
            "sampled(mesh={}): greedy correspondence, seed {seed}",
            xs.mesh.max(ys.mesh)
        ),
    })
}

/// Diameter of the registered compact models whose diameter is known
/// exactly.
fn closed_form_diameter(space: &SpaceDescriptor) -> Option<f64> {
    match space {
        SpaceDescriptor::Circle { length } => Some(0.5 * length),
        SpaceDescriptor::Suspension(_) | SpaceDescriptor::RoundSphere { .. } => Some(PI),
        _ => None,
    }
}

fn diameter_interval(space: &SpaceDescriptor, sample: &SampleSet) -> Result<(f64, f64, bool)> {
    match closed_form_diameter(space) {
        Some(d) => Ok((d, d, true)),
        None => {
            let (lo, hi) = diameter_bounds(space, sample)?;
            Ok((lo, hi, false))
        }
    }
}

/// Largest min pairwise distance over triples of sample points.
fn three_point_spread(space: &SpaceDescriptor, sample: &SampleSet) -> Result<f64> {
    let prep = PreparedSample::new(space, &sample.points)?;
    let n = prep.len();
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = prep.dist(i, j);
            if dij <= best {
                continue;
            }
            for k in (j + 1)..n {
                best = best.max(dij.min(prep.dist(i, k)).min(prep.dist(j, k)));
            }
        }
    }
    Ok(best)
}

/// Certified lower bound: the best of the diameter obstruction
/// ½|diam X − diam Y| and, for small samples, the three-point packing
/// obstruction, each with its mesh correction.
pub fn gh_lower_bound(
    x: &SpaceDescriptor,
    x_sample: &SampleSet,
    y: &SpaceDescriptor,
    y_sample: &SampleSet,
) -> Result<Bound> {
    if x_sample.is_empty() || y_sample.is_empty() {
        return Err(contract("lower bounds need nonempty samples"));
    }
    let (xlo, xhi, xexact) = diameter_interval(x, x_sample)?;
    let (ylo, yhi, yexact) = diameter_interval(y, y_sample)?;
    let diam = 0.5 * (xlo - yhi).max(ylo - xhi).max(0.0);
    let mut best = Bound {
        value: diam,
        provenance: if xexact && yexact {
            "closed_form: diameter obstruction".into()
        } else {
            format!(
                "sampled(mesh={}): diameter obstruction",
                x_sample.mesh.max(y_sample.mesh)
            )
        },
    };
    if x_sample.len() <= PACKING_MAX_POINTS && y_sample.len() <= PACKING_MAX_POINTS {
        let sx = three_point_spread(x, x_sample)?;
        let sy = three_point_spread(y, y_sample)?;
        let packing = 0.5 * (sx - sy - 2.0 * y_sample.mesh).max(sy - sx - 2.0 * x_sample.mesh);
        if packing > best.value {
            best = Bound {
                value: packing,
                provenance: format!(
                    "sampled(mesh={}): three-point packing obstruction",
                    x_sample.mesh.max(y_sample.mesh)
                ),
            };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GHInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_provenance: String,
    pub upper_provenance: String,
    pub mesh: f64,
}

impl GHInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Two-sided bound on d_GH(Z, 𝕊^{n−1}).
pub fn gh_to_sphere(z: &SpaceDescriptor, n: usize, mesh: f64) -> Result<GHInterval> {
    if !(2..=3).contains(&n) {
        return Err(contract(
            "sphere comparisons are implemented for n ∈ {2, 3}",
        ));
    }
    if !admits_cat1(z)?.admissible {
        return Err(contract(format!("{z} is not CAT(1)")));
    }
    let sphere = SpaceDescriptor::round_sphere(n - 1)?;
    let upper = gh_upper_bound(z, &sphere, Family::Auto, mesh)?;
    let zs = epsilon_net(z, None, mesh, 0)?;
    let ss = epsilon_net(&sphere, None, mesh, 0)?;
    let lower = gh_lower_bound(z, &zs, &sphere, &ss)?;
    if lower.value > upper.value {
        return Err(contract(format!(
            "lower bound {} exceeds upper bound {}",
            lower.value, upper.value
        )));
    }
    Ok(GHInterval {
        lower: lower.value,
        upper: upper.value,
        lower_provenance: lower.provenance,
        upper_provenance: upper.provenance,
        mesh,
    })
}
