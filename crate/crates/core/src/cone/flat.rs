use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::contract;
use crate::metric::{circle_distance, distance, ModelPoint, SpaceDescriptor, GEOMETRIC_TOL};
use crate::{Error, Result};

use super::{IdealPoint, Target};

/// Base angular distances within this of π count as the degenerate tie.
const TIE_TOL: f64 = 1e-12;

/// Planar unrolling of the sector of a flat cone between base angles
/// `reference` and `reference + orientation·width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DevelopedChart {
    pub reference: f64,
    /// +1 when base angles increase counterclockwise in the plane, −1 otherwise.
    pub orientation: f64,
    pub width: f64,
    pub period: f64,
}

impl DevelopedChart {
    pub fn new(reference: f64, orientation: f64, width: f64, period: f64) -> Result<Self> {
        if !(0.0..=PI + GEOMETRIC_TOL).contains(&width) {
            return Err(contract(format!("chart width {width} outside [0, π]")));
        }
        Ok(Self {
            reference,
            orientation: if orientation < 0.0 { -1.0 } else { 1.0 },
            width,
            period,
        })
    }

    /// Planar image of `(radius, angle)`, if the angle lies in the chart.
    pub fn to_plane(&self, radius: f64, angle: f64) -> Option<[f64; 2]> {
        let off = self.orientation * signed_offset(self.period, self.reference, angle);
        if off < -GEOMETRIC_TOL || off > self.width + GEOMETRIC_TOL {
            return None;
        }
        let (s, c) = off.sin_cos();
        Some([radius * c, radius * s])
    }

    /// `(radius, base angle)` of a planar point.
    pub fn from_plane(&self, xy: [f64; 2]) -> (f64, f64) {
        let r = xy[0].hypot(xy[1]);
        if r == 0.0 {
            return (0.0, 0.0);
        }
        let a = (self.reference + self.orientation * xy[1].atan2(xy[0])).rem_euclid(self.period);
        (r, if a >= self.period { 0.0 } else { a })
    }
}

/// Offset from `from` to `to` along a circle of length `period`, in (−period/2, period/2].
pub fn signed_offset(period: f64, from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(period);
    if d > 0.5 * period {
        d - period
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Leg {
    pub start: f64,
    pub end: f64,
    pub chart: DevelopedChart,
    pub from: [f64; 2],
    pub to: [f64; 2],
}

/// Unit-speed minimizing geodesic, stored as straight legs in developed charts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub breakpoints: Vec<(f64, ModelPoint)>,
    pub length: f64,
    pub through_apex: bool,
    /// Base angular distance exactly π: the chart segment and the path
    /// through the apex both minimize; the apex path is returned.
    pub apex_tie: bool,
    /// Parameter at which the path meets the apex, if it does.
    pub apex_parameter: Option<f64>,
    pub legs: Vec<Leg>,
}

impl GeodesicPath {
    pub fn point_at(&self, cone: &FlatCone, s: f64) -> Result<ModelPoint> {
        if !(-GEOMETRIC_TOL..=self.length + GEOMETRIC_TOL).contains(&s) {
            return Err(contract(format!(
                "parameter {s} outside [0, {}]",
                self.length
            )));
        }
        let leg = self
            .legs
            .iter()
            .find(|l| s <= l.end)
            .or(self.legs.last())
            .expect("a geodesic has at least one leg");
        let span = leg.end - leg.start;
        let lam = if span > 0.0 {
            ((s - leg.start) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let xy = [
            leg.from[0] + lam * (leg.to[0] - leg.from[0]),
            leg.from[1] + lam * (leg.to[1] - leg.from[1]),
        ];
        let (r, a) = leg.chart.from_plane(xy);
        cone.point(r, a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RayRule {
    FromApex,
    /// Straight line in a developed chart.
    Planar {
        chart: DevelopedChart,
        origin: [f64; 2],
        direction: [f64; 2],
    },
    /// Radially into the apex, then out along the apex ray.
    ThroughApex {
        radius: f64,
        angle: f64,
    },
}

/// Unit-speed ray from `base` asymptotic to `target`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayPath {
    pub base: ModelPoint,
    pub target: IdealPoint,
    pub rule: RayRule,
}

impl RayPath {
    pub fn point_at(&self, cone: &FlatCone, t: f64) -> Result<ModelPoint> {
        if !(t >= 0.0) {
            return Err(contract("ray parameter must be nonnegative"));
        }
        let xi = cone.base_angle(&self.target.0)?;
        match &self.rule {
            RayRule::FromApex => cone.point(t, xi),
            RayRule::Planar {
                chart,
                origin,
                direction,
            } => {
                let (r, a) =
                    chart.from_plane([origin[0] + t * direction[0], origin[1] + t * direction[1]]);
                cone.point(r, a)
            }
            RayRule::ThroughApex { radius, angle } => {
                if t <= *radius {
                    cone.point(radius - t, *angle)
                } else {
                    cone.point(t - radius, xi)
                }
            }
        }
    }
}

/// A direction at a point: an angular coordinate on the space of directions,
/// a circle of length 2π off the apex and of length L at the apex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionDescriptor {
    /// Off the apex, measured from the outward radial direction with
    /// positive values toward increasing base angle.
    pub coordinate: f64,
    pub period: f64,
    pub at_apex: bool,
}

impl DirectionDescriptor {
    pub fn angle_to(&self, other: &DirectionDescriptor) -> f64 {
        let d = circle_distance(self.period, self.coordinate, other.coordinate);
        if self.at_apex {
            d.min(PI)
        } else {
            d
        }
    }
}

/// Euclidean cone over a circle of length L ≥ 2π: a flat cone with cone
/// angle L, CAT(0) exactly because L ≥ 2π.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatCone {
    length: f64,
    space: SpaceDescriptor,
}

impl FlatCone {
    pub fn new(length: f64) -> Result<Self> {
        if !(length >= TAU - GEOMETRIC_TOL) {
            return Err(contract(format!(
                "flat cone needs a base circle of length ≥ 2π, got {length}"
            )));
        }
        let space = SpaceDescriptor::cone(SpaceDescriptor::circle(length)?)?;
        Ok(Self { length, space })
    }

    pub fn from_space(space: &SpaceDescriptor) -> Result<Self> {
        match space.base() {
            Some(SpaceDescriptor::Circle { length })
                if matches!(space, SpaceDescriptor::EuclideanCone(_)) =>
            {
                Self::new(*length)
            }
            _ => Err(contract("expected a cone over a circle")),
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn point(&self, radius: f64, angle: f64) -> Result<ModelPoint> {
        self.space
            .cone_point(radius, ModelPoint::Angle(angle.rem_euclid(self.length)))
    }

    pub fn ideal(&self, angle: f64) -> IdealPoint {
        let a = angle.rem_euclid(self.length);
        IdealPoint(ModelPoint::Angle(if a >= self.length { 0.0 } else { a }))
    }

    /// `(radius, base angle)` of a cone point.
    pub fn polar(&self, p: &ModelPoint) -> Result<(f64, f64)> {
        match p {
            ModelPoint::Radial { radius, base } => Ok((*radius, self.base_angle(base)?)),
            _ => Err(contract(format!("{p} is not a cone point"))),
        }
    }

    fn base_angle(&self, x: &ModelPoint) -> Result<f64> {
        match x {
            ModelPoint::Angle(a) => Ok(*a),
            _ => Err(contract(format!("{x} is not a point of the base circle"))),
        }
    }

    pub fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
        distance(&self.space, p, q)
    }

    pub fn geodesic(&self, p: &ModelPoint, q: &ModelPoint) -> Result<GeodesicPath> {
        let (tp, ap) = self.polar(p)?;
        let (tq, aq) = self.polar(q)?;
        let length = self.distance(p, q)?;
        if length == 0.0 {
            return Err(Error::Degenerate("geodesic endpoints coincide".into()));
        }
        let apex = self.point(0.0, 0.0)?;
        let radial = |reference: f64| DevelopedChart::new(reference, 1.0, 0.0, self.length);
        if tp == 0.0 || tq == 0.0 {
            let (reference, from, to) = if tp == 0.0 {
                (aq, [0.0, 0.0], [tq, 0.0])
            } else {
                (ap, [tp, 0.0], [0.0, 0.0])
            };
            return Ok(GeodesicPath {
                breakpoints: vec![(0.0, p.clone()), (length, q.clone())],
                length,
                through_apex: true,
                apex_tie: false,
                apex_parameter: Some(if tp == 0.0 { 0.0 } else { length }),
                legs: vec![Leg {
                    start: 0.0,
                    end: length,
                    chart: radial(reference)?,
                    from,
                    to,
                }],
            });
        }
        let delta = signed_offset(self.length, ap, aq);
        let theta = delta.abs();
        if theta >= PI - TIE_TOL {
            return Ok(GeodesicPath {
                breakpoints: vec![(0.0, p.clone()), (tp, apex), (length, q.clone())],
                length,
                through_apex: true,
                apex_tie: (theta - PI).abs() <= TIE_TOL,
                apex_parameter: Some(tp),
                legs: vec![
                    Leg {
                        start: 0.0,
                        end: tp,
                        chart: radial(ap)?,
                        from: [tp, 0.0],
                        to: [0.0, 0.0],
                    },
                    Leg {
                        start: tp,
                        end: length,
                        chart: radial(aq)?,
                        from: [0.0, 0.0],
                        to: [tq, 0.0],
                    },
                ],
            });
        }
        let chart = DevelopedChart::new(ap, delta.signum(), theta, self.length)?;
        let to = chart
            .to_plane(tq, aq)
            .expect("endpoint lies in its own chart");
        Ok(GeodesicPath {
            breakpoints: vec![(0.0, p.clone()), (length, q.clone())],
            length,
            through_apex: false,
            apex_tie: false,
            apex_parameter: None,
            legs: vec![Leg {
                start: 0.0,
                end: length,
                chart,
                from: [tp, 0.0],
                to,
            }],
        })
    }

    pub fn ray(&self, p: &ModelPoint, xi: &IdealPoint) -> Result<RayPath> {
        let (tp, ap) = self.polar(p)?;
        let ax = self.base_angle(&xi.0)?;
        let rule = if tp == 0.0 {
            RayRule::FromApex
        } else {
            let delta = signed_offset(self.length, ap, ax);
            let theta = delta.abs();
            if theta >= PI - TIE_TOL {
                RayRule::ThroughApex {
                    radius: tp,
                    angle: ap,
                }
            } else {
                let orientation = if delta < 0.0 { -1.0 } else { 1.0 };
                RayRule::Planar {
                    chart: DevelopedChart::new(ap, orientation, PI, self.length)?,
                    origin: [tp, 0.0],
                    direction: [theta.cos(), theta.sin()],
                }
            }
        };
        Ok(RayPath {
            base: p.clone(),
            target: xi.clone(),
            rule,
        })
    }

    /// Initial direction at `p` of the geodesic or ray toward `target`.
    pub fn direction(&self, p: &ModelPoint, target: Target) -> Result<DirectionDescriptor> {
        let (tp, ap) = self.polar(p)?;
        if tp == 0.0 {
            let coordinate = match target {
                Target::Point(a) => {
                    let (ta, aa) = self.polar(a)?;
                    if ta == 0.0 {
                        return Err(Error::Degenerate("target coincides with the foot".into()));
                    }
                    aa
                }
                Target::Ideal(xi) => self.base_angle(&xi.0)?,
            };
            return Ok(DirectionDescriptor {
                coordinate,
                period: self.length,
                at_apex: true,
            });
        }
        let coordinate = match target {
            Target::Point(a) => {
                let (ta, aa) = self.polar(a)?;
                let delta = signed_offset(self.length, ap, aa);
                let theta = delta.abs();
                if ta == 0.0 || theta >= PI - TIE_TOL {
                    PI
                } else if theta == 0.0 {
                    if ta > tp {
                        0.0
                    } else if ta < tp {
                        PI
                    } else {
                        return Err(Error::Degenerate("target coincides with the foot".into()));
                    }
                } else {
                    delta.signum() * (ta * theta.sin()).atan2(ta * theta.cos() - tp)
                }
            }
            Target::Ideal(xi) => {
                let delta = signed_offset(self.length, ap, self.base_angle(&xi.0)?);
                if delta.abs() >= PI - TIE_TOL {
                    PI
                } else {
                    delta
                }
            }
        };
        Ok(DirectionDescriptor {
            coordinate,
            period: TAU,
            at_apex: false,
        })
    }

    pub fn angle_at(&self, p: &ModelPoint, a: Target, b: Target) -> Result<f64> {
        let da = self.direction(p, a)?;
        let db = self.direction(p, b)?;
        Ok(da.angle_to(&db))
    }
}
