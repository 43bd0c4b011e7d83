//! Strainers at infinity of Euclidean cones, the Busemann maps they define,
//! the openness iteration, and regularity and distortion estimates.

mod checks;
mod iteration;

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::busemann::BusemannFunction;
use crate::cat1::{admits_cat1, certify_suspender, find_suspender, SuspenderCertificate};
use crate::cone::{cone_model, ConeModel, IdealPoint, Target};
use crate::error::contract;
use crate::metric::{ModelPoint, SampleSet, SpaceDescriptor};
use crate::Result;

pub use checks::{
    bilipschitz_verify, equal_endpoint_geodesics, first_variation_inequalities_check,
    lipschitz_and_open_constants, random_geodesics, sphere_map_distortion, BilipReport,
    FirstVariationSuite, RegularityReport, SphereMapReport, DEFAULT_PAIR_BUDGET,
};
pub use iteration::{openness_iteration, IterationTrace, TraceRow};

/// Grid on which certified defects are reported.
pub const DELTA_STEP: f64 = 1e-3;

/// Number of random cone points at which directions are spot-checked.
const SPOT_POINTS: usize = 10;
const SPOT_SEED: u64 = 0x5107_c4ec;

/// Smallest multiple of [`DELTA_STEP`] strictly above a suspender defect:
/// the sharpest δ a tuple certifies on its sample.
pub fn sharpest_delta(defect: f64) -> f64 {
    let k = (defect / DELTA_STEP).floor() + 1.0;
    (k.max(1.0) * DELTA_STEP * 1e6).round() / 1e6
}

/// Defect of the directions toward a tuple at one cone point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionDefect {
    pub point: ModelPoint,
    /// Largest of π − ∠(ξ_i, η_i) and ∠(a, b) − π/2 over cross pairs; at the
    /// apex the base certificate's defect.
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionCheck {
    pub samples: Vec<DirectionDefect>,
    pub bound: f64,
    pub passed: bool,
}

/// An (m, δ)-suspender of the base, read as a tuple of ideal points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealStrainer {
    pub m: usize,
    pub xi: Vec<IdealPoint>,
    pub eta: Vec<IdealPoint>,
    pub delta: f64,
    pub certificate: SuspenderCertificate,
    /// Absent when the cone has no geodesic model (graph bases).
    pub direction_check: Option<DirectionCheck>,
}

fn cone_base(cone: &SpaceDescriptor) -> Result<&SpaceDescriptor> {
    match cone {
        SpaceDescriptor::EuclideanCone(b) => Ok(b),
        _ => Err(contract("strainers at infinity live on cones")),
    }
}

fn require_admissible(base: &SpaceDescriptor) -> Result<()> {
    if !admits_cat1(base)?.admissible {
        return Err(contract(format!("base {base} is not CAT(1)")));
    }
    Ok(())
}

/// Certifies a tuple of base points and opposites as an (m, δ)-strainer at
/// infinity, then spot-checks the directions at random cone points.
pub fn certify_ideal_strainer(
    cone: &SpaceDescriptor,
    xi: &[ModelPoint],
    eta: &[ModelPoint],
    base_sample: &SampleSet,
    delta: f64,
) -> Result<Option<IdealStrainer>> {
    let base = cone_base(cone)?;
    require_admissible(base)?;
    match certify_suspender(base, base_sample, xi, eta, delta)? {
        Some(cert) => from_certificate(cone, base_sample, cert),
        None => Ok(None),
    }
}

/// Searches the base sample for an (m, δ)-suspender and certifies it.
pub fn find_ideal_strainer(
    cone: &SpaceDescriptor,
    base_sample: &SampleSet,
    m: usize,
    delta: f64,
    budget: u64,
) -> Result<Option<IdealStrainer>> {
    let base = cone_base(cone)?;
    require_admissible(base)?;
    match find_suspender(base, base_sample, m, delta, budget)? {
        Some(cert) => from_certificate(cone, base_sample, cert),
        None => Ok(None),
    }
}

/// The strainer of order m certifying the smallest δ on the [`DELTA_STEP`]
/// grid up to `delta_max`, found by bisection over searches.
pub fn sharpest_ideal_strainer(
    cone: &SpaceDescriptor,
    base_sample: &SampleSet,
    m: usize,
    delta_max: f64,
    budget: u64,
) -> Result<Option<IdealStrainer>> {
    let mut hi = (delta_max / DELTA_STEP).floor() as u64;
    if hi == 0 {
        return Err(contract("delta_max must be at least one grid step"));
    }
    let grid = |k: u64| k as f64 * DELTA_STEP;
    let Some(mut best) = find_ideal_strainer(cone, base_sample, m, grid(hi), budget)? else {
        return Ok(None);
    };
    let mut lo = 0;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match find_ideal_strainer(cone, base_sample, m, grid(mid), budget)? {
            Some(s) => {
                hi = mid;
                best = s;
            }
            None => lo = mid,
        }
    }
    Ok(Some(best))
}

fn from_certificate(
    cone: &SpaceDescriptor,
    base_sample: &SampleSet,
    cert: SuspenderCertificate,
) -> Result<Option<IdealStrainer>> {
    let xi: Vec<IdealPoint> = cert.p_tuple.iter().cloned().map(IdealPoint).collect();
    let eta: Vec<IdealPoint> = cert.q_tuple.iter().cloned().map(IdealPoint).collect();
    let direction_check = match cone_model(cone) {
        Ok(model) => Some(direction_check(
            model.as_ref(),
            &xi,
            &eta,
            base_sample,
            &cert,
        )?),
        Err(_) => None,
    };
    if direction_check.as_ref().is_some_and(|c| !c.passed) {
        return Ok(None);
    }
    Ok(Some(IdealStrainer {
        m: cert.m,
        delta: cert.delta,
        xi,
        eta,
        certificate: cert,
        direction_check,
    }))
}

/// Directions toward the tuple at a point, measured against the suspender
/// bounds. At smooth points the space of directions is a round circle or
/// sphere, where the sum constraint reduces to π − ∠(ξ_i, η_i).
fn direction_defect(
    model: &dyn ConeModel,
    p: &ModelPoint,
    xi: &[IdealPoint],
    eta: &[IdealPoint],
) -> Result<f64> {
    let angle =
        |a: &IdealPoint, b: &IdealPoint| model.angle_at(p, Target::Ideal(a), Target::Ideal(b));
    let mut worst = f64::NEG_INFINITY;
    for (a, b) in xi.iter().zip(eta) {
        worst = worst.max(PI - angle(a, b)?);
    }
    for i in 0..xi.len() {
        for j in (i + 1)..xi.len() {
            for (a, b) in [
                (&xi[i], &xi[j]),
                (&xi[i], &eta[j]),
                (&eta[i], &xi[j]),
                (&eta[i], &eta[j]),
            ] {
                worst = worst.max(angle(a, b)? - FRAC_PI_2);
            }
        }
    }
    Ok(worst)
}

fn direction_check(
    model: &dyn ConeModel,
    xi: &[IdealPoint],
    eta: &[IdealPoint],
    base_sample: &SampleSet,
    cert: &SuspenderCertificate,
) -> Result<DirectionCheck> {
    let cone = model.space();
    let mut samples = vec![DirectionDefect {
        point: cone.apex()?,
        defect: cert.defect,
    }];
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_SEED);
    for _ in 0..SPOT_POINTS {
        let z = base_sample.points[rng.gen_range(0..base_sample.len())].clone();
        let p = cone.cone_point(rng.gen_range(0.25..2.0), z)?;
        let defect = direction_defect(model, &p, xi, eta)?;
        samples.push(DirectionDefect { point: p, defect });
    }
    let bound = cert.delta + 2.0 * base_sample.mesh + 1e-9;
    let passed = samples.iter().all(|s| s.defect <= bound);
    Ok(DirectionCheck {
        samples,
        bound,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MapKind {
    Strainer,
    Pseudo,
}

/// φ = (b_1, …, b_m) for the apex rays toward ξ_1, …, ξ_m.
///
/// `eta` holds the ideal points the openness iteration moves toward when a
/// coordinate must increase.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainerMap {
    cone: SpaceDescriptor,
    xi: Vec<IdealPoint>,
    eta: Vec<IdealPoint>,
    delta: f64,
    kind: MapKind,
    functions: Vec<BusemannFunction>,
}

impl StrainerMap {
    pub fn new(cone: &SpaceDescriptor, strainer: &IdealStrainer) -> Result<Self> {
        Self::build(
            cone,
            &strainer.xi,
            &strainer.eta,
            strainer.delta,
            MapKind::Strainer,
        )
    }

    /// A map whose rays only satisfy |∠_x(ξ_i, ξ_j) − π/2| < 2δ pointwise;
    /// the caller vouches for `delta` (see [`StrainerMap::pseudo_defect`]).
    pub fn pseudo(
        cone: &SpaceDescriptor,
        xi: &[IdealPoint],
        eta: &[IdealPoint],
        delta: f64,
    ) -> Result<Self> {
        Self::build(cone, xi, eta, delta, MapKind::Pseudo)
    }

    fn build(
        cone: &SpaceDescriptor,
        xi: &[IdealPoint],
        eta: &[IdealPoint],
        delta: f64,
        kind: MapKind,
    ) -> Result<Self> {
        cone_base(cone)?;
        if xi.is_empty() || xi.len() != eta.len() {
            return Err(contract(
                "a strainer map needs m ≥ 1 directions and m opposites",
            ));
        }
        if !(delta > 0.0) {
            return Err(contract("strainer defect must be positive"));
        }
        let functions = xi
            .iter()
            .map(|x| BusemannFunction::new(cone, x))
            .collect::<Result<Vec<_>>>()?;
        let xi = functions.iter().map(|f| f.xi().clone()).collect();
        let eta = eta
            .iter()
            .map(|e| BusemannFunction::new(cone, e).map(|f| f.xi().clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cone: cone.clone(),
            xi,
            eta,
            delta,
            kind,
            functions,
        })
    }

    pub fn m(&self) -> usize {
        self.functions.len()
    }

    pub fn cone(&self) -> &SpaceDescriptor {
        &self.cone
    }

    pub fn xi(&self) -> &[IdealPoint] {
        &self.xi
    }

    pub fn eta(&self) -> &[IdealPoint] {
        &self.eta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn functions(&self) -> &[BusemannFunction] {
        &self.functions
    }

    pub fn model(&self) -> Result<Box<dyn ConeModel>> {
        cone_model(&self.cone)
    }

    pub fn evaluate(&self, p: &ModelPoint) -> Result<Vec<f64>> {
        self.functions.iter().map(|f| f.closed_form(p)).collect()
    }

    /// Half the largest |∠_x(ξ_i, ξ_j) − π/2| over the sample: the smallest
    /// constant for which the pseudo-strainer condition holds there.
    pub fn pseudo_defect(&self, sample: &SampleSet) -> Result<f64> {
        let model = self.model()?;
        let mut worst: f64 = 0.0;
        for p in &sample.points {
            for i in 0..self.m() {
                for j in (i + 1)..self.m() {
                    let a = model.angle_at(
                        p,
                        Target::Ideal(&self.xi[i]),
                        Target::Ideal(&self.xi[j]),
                    )?;
                    worst = worst.max(0.5 * (a - FRAC_PI_2).abs());
                }
            }
        }
        Ok(worst)
    }
}

pub(crate) fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub(crate) fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
