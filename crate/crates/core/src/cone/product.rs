//! Cone over the suspension of a circle, through the isometry
//! C₀(susp Y) ≅ ℝ × C₀(Y), (t, (s, y)) ↦ (t cos s, (t sin s, y)).

use crate::error::contract;
use crate::metric::{distance, ModelPoint, SpaceDescriptor, GEOMETRIC_TOL};
use crate::Result;

use super::flat::FlatCone;
use super::{IdealPoint, Target};

/// A tangent vector in the product: height component and a flat-cone
/// component given by its length and direction.
#[derive(Debug, Clone, Copy)]
struct Velocity {
    height: f64,
    speed: f64,
    direction: Option<super::flat::DirectionDescriptor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuspensionCone {
    flat: FlatCone,
    suspension: SpaceDescriptor,
    space: SpaceDescriptor,
}

impl SuspensionCone {
    pub fn new(length: f64) -> Result<Self> {
        let flat = FlatCone::new(length)?;
        let suspension = SpaceDescriptor::suspension(SpaceDescriptor::circle(length)?)?;
        let space = SpaceDescriptor::cone(suspension.clone())?;
        Ok(Self {
            flat,
            suspension,
            space,
        })
    }

    pub fn from_space(space: &SpaceDescriptor) -> Result<Self> {
        match space {
            SpaceDescriptor::EuclideanCone(b) => match b.as_ref() {
                SpaceDescriptor::Suspension(c) => match c.as_ref() {
                    SpaceDescriptor::Circle { length } => Self::new(*length),
                    _ => Err(contract("expected a cone over the suspension of a circle")),
                },
                _ => Err(contract("expected a cone over a suspension")),
            },
            _ => Err(contract("expected a cone")),
        }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn flat(&self) -> &FlatCone {
        &self.flat
    }

    pub fn suspension(&self) -> &SpaceDescriptor {
        &self.suspension
    }

    /// Cone point with radius `t` over the suspension point (s, angle).
    pub fn point(&self, t: f64, s: f64, angle: f64) -> Result<ModelPoint> {
        let z = self
            .suspension
            .polar_point(s, ModelPoint::Angle(angle.rem_euclid(self.flat.length())))?;
        self.space.cone_point(t, z)
    }

    pub fn ideal(&self, s: f64, angle: f64) -> Result<IdealPoint> {
        Ok(IdealPoint(self.suspension.polar_point(
            s,
            ModelPoint::Angle(angle.rem_euclid(self.flat.length())),
        )?))
    }

    fn polar_of(&self, z: &ModelPoint) -> Result<(f64, f64)> {
        match z {
            ModelPoint::Polar { polar, base } => match base.as_ref() {
                ModelPoint::Angle(a) => Ok((*polar, *a)),
                _ => Err(contract("suspension base point must be an angle")),
            },
            _ => Err(contract(format!("{z} is not a suspension point"))),
        }
    }

    /// Height and flat-cone component of a cone point.
    pub fn to_product(&self, p: &ModelPoint) -> Result<(f64, ModelPoint)> {
        let (t, z) = match p {
            ModelPoint::Radial { radius, base } => (*radius, base.as_ref()),
            _ => return Err(contract(format!("{p} is not a cone point"))),
        };
        let (s, a) = self.polar_of(z)?;
        let (sn, cs) = s.sin_cos();
        Ok((t * cs, self.flat.point(t * sn, a)?))
    }

    pub fn from_product(&self, h: f64, w: &ModelPoint) -> Result<ModelPoint> {
        let (rho, a) = self.flat.polar(w)?;
        let t = h.hypot(rho);
        self.point(t, rho.atan2(h), a)
    }

    pub fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
        distance(&self.space, p, q)
    }

    pub fn geodesic_point(&self, p: &ModelPoint, q: &ModelPoint, s: f64) -> Result<ModelPoint> {
        let total = self.distance(p, q)?;
        if total == 0.0 {
            return Err(crate::Error::Degenerate(
                "geodesic endpoints coincide".into(),
            ));
        }
        let lam = (s / total).clamp(0.0, 1.0);
        let (hp, wp) = self.to_product(p)?;
        let (hq, wq) = self.to_product(q)?;
        let h = (1.0 - lam) * hp + lam * hq;
        let w = if self.flat.distance(&wp, &wq)? == 0.0 {
            wp
        } else {
            let g = self.flat.geodesic(&wp, &wq)?;
            g.point_at(&self.flat, lam * g.length)?
        };
        self.from_product(h, &w)
    }

    /// Parameter at which the flat-cone component of the geodesic passes
    /// through its apex, the only place the product geodesic can bend.
    pub fn apex_parameter(&self, p: &ModelPoint, q: &ModelPoint) -> Result<Option<f64>> {
        let total = self.distance(p, q)?;
        let (_, wp) = self.to_product(p)?;
        let (_, wq) = self.to_product(q)?;
        if self.flat.distance(&wp, &wq)? == 0.0 {
            return Ok(None);
        }
        let g = self.flat.geodesic(&wp, &wq)?;
        Ok(g.apex_parameter.map(|a| a / g.length * total))
    }

    pub fn ray_point(&self, p: &ModelPoint, xi: &IdealPoint, t: f64) -> Result<ModelPoint> {
        let (s, a) = self.polar_of(&xi.0)?;
        let (hp, wp) = self.to_product(p)?;
        let (sn, cs) = s.sin_cos();
        let w = if sn > 0.0 {
            let ray = self.flat.ray(&wp, &self.flat.ideal(a))?;
            ray.point_at(&self.flat, t * sn)?
        } else {
            wp
        };
        self.from_product(hp + t * cs, &w)
    }

    fn velocity(&self, hp: f64, wp: &ModelPoint, target: Target) -> Result<Velocity> {
        match target {
            Target::Point(a) => {
                let (ha, wa) = self.to_product(a)?;
                let mut speed = self.flat.distance(wp, &wa)?;
                // Round-off can leave a positive separation between feet that
                // the flat chart resolves as one point; the motion is vertical.
                let direction = if speed > 0.0 {
                    match self.flat.direction(wp, Target::Point(&wa)) {
                        Ok(d) => Some(d),
                        Err(crate::Error::Degenerate(_)) => {
                            speed = 0.0;
                            None
                        }
                        Err(e) => return Err(e),
                    }
                } else {
                    None
                };
                Ok(Velocity {
                    height: ha - hp,
                    speed,
                    direction,
                })
            }
            Target::Ideal(xi) => {
                let (s, a) = self.polar_of(&xi.0)?;
                let (sn, cs) = s.sin_cos();
                let direction = if sn > 0.0 {
                    Some(
                        self.flat
                            .direction(wp, Target::Ideal(&self.flat.ideal(a)))?,
                    )
                } else {
                    None
                };
                Ok(Velocity {
                    height: cs,
                    speed: sn,
                    direction,
                })
            }
        }
    }

    pub fn angle_at(&self, p: &ModelPoint, a: Target, b: Target) -> Result<f64> {
        let (hp, wp) = self.to_product(p)?;
        let va = self.velocity(hp, &wp, a)?;
        let vb = self.velocity(hp, &wp, b)?;
        let na = va.height.hypot(va.speed);
        let nb = vb.height.hypot(vb.speed);
        if na <= GEOMETRIC_TOL * 1e-3 || nb <= GEOMETRIC_TOL * 1e-3 {
            return Err(crate::Error::Degenerate(
                "target coincides with the foot".into(),
            ));
        }
        // Realize both velocities in ℝ³ with the flat components at their
        // angle in the space of directions, then take the stable angle.
        let phi = match (va.direction, vb.direction) {
            (Some(da), Some(db)) => da.angle_to(&db),
            _ => 0.0,
        };
        let x = [va.height / na, va.speed / na, 0.0];
        let (sp, cp) = phi.sin_cos();
        let y = [vb.height / nb, vb.speed / nb * cp, vb.speed / nb * sp];
        Ok(crate::metric::sphere_angle(&x, &y))
    }
}
