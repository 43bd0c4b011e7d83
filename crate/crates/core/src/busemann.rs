//! Busemann functions of apex rays on cone models.
//!
//! For the ray from the apex toward ξ, b(s·x) = −s·cos((d ∧ π)(ξ, x)). The
//! limit definition lim (d(p, γ(t)) − t) is kept as an independent evaluator.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::cone::{ConeModel, IdealPoint, Target};
use crate::error::contract;
use crate::metric::{cone_law, truncated_distance, ModelPoint, SampleSet, SpaceDescriptor};
use crate::pairs::{reduce_pairs, PairPlan};
use crate::{Error, Result};

/// Forward-difference step for first-variation checks.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EvaluationMode {
    ClosedForm,
    /// d(p, γ(t_max)) − t_max.
    Limit {
        t_max: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusemannFunction {
    cone: SpaceDescriptor,
    xi: IdealPoint,
    mode: EvaluationMode,
}

impl BusemannFunction {
    pub fn new(cone: &SpaceDescriptor, xi: &IdealPoint) -> Result<Self> {
        let base = match cone {
            SpaceDescriptor::EuclideanCone(b) => b,
            _ => return Err(contract("Busemann functions are defined on cones here")),
        };
        let xi = IdealPoint(base.normalize(&xi.0)?);
        Ok(Self {
            cone: cone.clone(),
            xi,
            mode: EvaluationMode::ClosedForm,
        })
    }

    pub fn with_mode(mut self, mode: EvaluationMode) -> Result<Self> {
        if let EvaluationMode::Limit { t_max } = mode {
            if !(t_max > 0.0 && t_max.is_finite()) {
                return Err(contract(format!("t_max must be positive, got {t_max}")));
            }
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn xi(&self) -> &IdealPoint {
        &self.xi
    }

    pub fn cone(&self) -> &SpaceDescriptor {
        &self.cone
    }

    pub fn mode(&self) -> EvaluationMode {
        self.mode
    }

    fn parts<'p>(&self, p: &'p ModelPoint) -> Result<(f64, &'p ModelPoint)> {
        match p {
            ModelPoint::Radial { radius, base } => Ok((*radius, base)),
            _ => Err(contract(format!("{p} is not a cone point"))),
        }
    }

    fn base(&self) -> &SpaceDescriptor {
        self.cone.base().expect("checked at construction")
    }

    pub fn eval(&self, p: &ModelPoint) -> Result<f64> {
        match self.mode {
            EvaluationMode::ClosedForm => self.closed_form(p),
            EvaluationMode::Limit { t_max } => self.limit(p, t_max),
        }
    }

    pub fn closed_form(&self, p: &ModelPoint) -> Result<f64> {
        let (s, x) = self.parts(p)?;
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(-s * truncated_distance(self.base(), &self.xi.0, x)?.cos())
    }

    /// d(p, γ(t)) − t at t = `t_max`, written as (d² − t²)/(d + t) so the
    /// subtraction of two numbers of size t does not swamp the result.
    pub fn limit(&self, p: &ModelPoint, t_max: f64) -> Result<f64> {
        if !(t_max > 0.0) {
            return Err(contract("t_max must be positive"));
        }
        let (s, x) = self.parts(p)?;
        if s == 0.0 {
            return Ok(0.0);
        }
        let theta = truncated_distance(self.base(), &self.xi.0, x)?;
        let d = cone_law(s, t_max, theta);
        let h = (0.5 * theta).sin();
        let numerator = s * s - 2.0 * s * t_max + 4.0 * s * t_max * h * h;
        Ok(numerator / (d + t_max))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoroballReport {
    pub predicted: f64,
    pub measured: f64,
    pub residual: f64,
    pub bound: f64,
    pub boundary_samples: usize,
}

/// Compares the distance from `p` to the horoball {b ≤ −r} with b(p) + r,
/// using the sample points within mesh of the horosphere {b = −r}.
pub fn horoball_identity_check(
    bf: &BusemannFunction,
    p: &ModelPoint,
    r: f64,
    sample: &SampleSet,
) -> Result<HoroballReport> {
    let bp = bf.closed_form(p)?;
    if bp <= -r {
        return Err(contract("the point lies inside the horoball"));
    }
    let mut measured = f64::INFINITY;
    let mut count = 0;
    for z in &sample.points {
        if (bf.closed_form(z)? + r).abs() <= sample.mesh {
            count += 1;
            measured = measured.min(crate::metric::distance(bf.cone(), p, z)?);
        }
    }
    if count == 0 {
        return Err(Error::EmptyDomain(
            "no sample point near the horosphere".into(),
        ));
    }
    let predicted = bp + r;
    Ok(HoroballReport {
        predicted,
        measured,
        residual: (measured - predicted).abs(),
        bound: 2.0 * sample.mesh,
        boundary_samples: count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstVariationReport {
    pub derivative: f64,
    pub angle: f64,
    pub residual: f64,
}

/// Forward-difference derivative of b along the geodesic from `x` to `y`
/// against −cos ∠_x(ξ, y).
pub fn first_variation_check(
    model: &dyn ConeModel,
    bf: &BusemannFunction,
    x: &ModelPoint,
    y: &ModelPoint,
) -> Result<FirstVariationReport> {
    let d = model.distance(x, y)?;
    if d == 0.0 {
        return Err(Error::Degenerate("x and y coincide".into()));
    }
    let h = FD_STEP.min(d);
    if let Some(a) = model.apex_parameter(x, y)? {
        if a > 0.0 && a <= h {
            return Err(Error::StepDegeneracy);
        }
    }
    let step = model.geodesic_point(x, y, h)?;
    let derivative = (bf.closed_form(&step)? - bf.closed_form(x)?) / h;
    let angle = model.angle_at(x, Target::Ideal(bf.xi()), Target::Point(y))?;
    Ok(FirstVariationReport {
        derivative,
        angle,
        residual: (derivative + angle.cos()).abs(),
    })
}

/// Point with the same base as `y` on the level set of b through `level`,
/// if one exists away from the apex.
pub fn level_partner(
    bf: &BusemannFunction,
    y: &ModelPoint,
    level: f64,
) -> Result<Option<ModelPoint>> {
    let x = match y {
        ModelPoint::Radial { base, .. } => base.as_ref(),
        _ => return Err(contract("level partners live in the cone")),
    };
    let c = truncated_distance(bf.base(), &bf.xi.0, x)?.cos();
    if c.abs() < 1e-12 {
        return Ok(None);
    }
    let s = -level / c;
    if !(s > 1e-9) {
        return Ok(None);
    }
    bf.cone().cone_point(s, x.clone()).map(Some)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelAngleReport {
    pub level_pairs: usize,
    pub max_level_angle: f64,
    pub min_level_angle: f64,
    pub level_upper_bound: f64,
    pub level_lower_bound: f64,
    pub sum_pairs: usize,
    pub min_angle_sum: f64,
    pub max_angle_sum: f64,
    pub sum_lower_bound: f64,
    pub sum_upper_bound: f64,
    pub violations: usize,
}

impl LevelAngleReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Angles against ξ on level sets of b, and angle sums on arbitrary pairs,
/// for a ξ that is a (1, δ)-strainer at infinity.
///
/// Level pairs are built by rescaling each sample point radially onto the
/// level of another; `pair_budget` caps both scans.
pub fn level_set_angle_check(
    model: &dyn ConeModel,
    bf: &BusemannFunction,
    delta: f64,
    sample: &SampleSet,
    pair_budget: usize,
    seed: u64,
) -> Result<LevelAngleReport> {
    let pts: Vec<&ModelPoint> = sample.points.iter().filter(|p| !p.is_apex()).collect();
    let n = pts.len();
    if n < 2 {
        return Err(Error::EmptyDomain(
            "sample has fewer than two points off the apex".into(),
        ));
    }
    let xi = Target::Ideal(bf.xi());
    let level_hi = FRAC_PI_2 + 1e-9;
    let level_lo = FRAC_PI_2 - 2.0 * delta;
    let sum_hi = PI + 1e-9;
    let sum_lo = PI - 2.0 * delta;

    #[derive(Clone)]
    struct Acc {
        count: usize,
        lo: f64,
        hi: f64,
        bad: usize,
        err: Option<String>,
    }
    let ident = Acc {
        count: 0,
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
        bad: 0,
        err: None,
    };
    let combine = |a: Acc, b: Acc| Acc {
        count: a.count + b.count,
        lo: a.lo.min(b.lo),
        hi: a.hi.max(b.hi),
        bad: a.bad + b.bad,
        err: a.err.or(b.err),
    };
    let one = |v: std::result::Result<Option<f64>, Error>, lo: f64, hi: f64| match v {
        Ok(Some(a)) => Acc {
            count: 1,
            lo: a,
            hi: a,
            bad: usize::from(!(a > lo && a <= hi)),
            err: None,
        },
        Ok(None) => Acc {
            count: 0,
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
            bad: 0,
            err: None,
        },
        Err(e) => Acc {
            count: 0,
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
            bad: 0,
            err: Some(e.to_string()),
        },
    };

    let plan = PairPlan::within_budget(n, pair_budget / 2, seed);
    let level = reduce_pairs(
        n,
        plan,
        ident.clone(),
        |i, j| {
            let run = || -> Result<Option<(f64, f64)>> {
                let level = bf.closed_form(pts[i])?;
                let Some(yp) = level_partner(bf, pts[j], level)? else {
                    return Ok(None);
                };
                if model.distance(pts[i], &yp)? < 1e-9 {
                    return Ok(None);
                }
                let a = model.angle_at(pts[i], xi, Target::Point(&yp))?;
                let b = model.angle_at(&yp, xi, Target::Point(pts[i]))?;
                Ok(Some((a, b)))
            };
            match run() {
                Ok(Some((a, b))) => combine(
                    one(Ok(Some(a)), level_lo, level_hi),
                    one(Ok(Some(b)), level_lo, level_hi),
                ),
                Ok(None) => one(Ok(None), 0.0, 0.0),
                Err(e) => one(Err(e), 0.0, 0.0),
            }
        },
        combine,
    );
    let sums = reduce_pairs(
        n,
        plan,
        ident,
        |i, j| {
            let run = || -> Result<Option<f64>> {
                let a = model.angle_at(pts[i], xi, Target::Point(pts[j]))?;
                let b = model.angle_at(pts[j], xi, Target::Point(pts[i]))?;
                Ok(Some(a + b))
            };
            one(run(), sum_lo, sum_hi)
        },
        combine,
    );
    if let Some(e) = level.err.or(sums.err.clone()) {
        return Err(contract(e));
    }
    if level.count == 0 {
        return Err(Error::EmptyDomain("no level pairs found".into()));
    }
    Ok(LevelAngleReport {
        level_pairs: level.count / 2,
        max_level_angle: level.hi,
        min_level_angle: level.lo,
        level_upper_bound: level_hi,
        level_lower_bound: level_lo,
        sum_pairs: sums.count,
        min_angle_sum: sums.lo,
        max_angle_sum: sums.hi,
        sum_lower_bound: sum_lo,
        sum_upper_bound: sum_hi,
        violations: level.bad + sums.bad,
    })
}
