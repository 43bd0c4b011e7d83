//! Geodesics, rays and angles in Euclidean cones over circles (by planar
//! development) and over suspensions of circles (by the product splitting).

mod flat;
mod product;

use serde::Serialize;

use crate::error::contract;
use crate::metric::{ModelPoint, SpaceDescriptor};
use crate::Result;

pub use flat::{
    signed_offset, DevelopedChart, DirectionDescriptor, FlatCone, GeodesicPath, Leg, RayPath,
    RayRule,
};
pub use product::SuspensionCone;

/// Point of the cone's base standing for the asymptotic class of the apex
/// ray through it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealPoint(pub ModelPoint);

impl std::fmt::Display for IdealPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ideal({})", self.0)
    }
}

/// Something a direction at a point can aim at.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Point(&'a ModelPoint),
    Ideal(&'a IdealPoint),
}

/// The geometric primitives the Busemann and strainer machinery needs.
pub trait ConeModel: Sync + Send {
    fn space(&self) -> &SpaceDescriptor;

    fn distance(&self, p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
        crate::metric::distance(self.space(), p, q)
    }

    /// Point at arc length `s` along the geodesic from `p` to `q`.
    fn geodesic_point(&self, p: &ModelPoint, q: &ModelPoint, s: f64) -> Result<ModelPoint>;

    /// Arc length at which the geodesic from `p` to `q` meets a point where
    /// it may fail to be smooth, if any.
    fn apex_parameter(&self, p: &ModelPoint, q: &ModelPoint) -> Result<Option<f64>>;

    /// Point at parameter `t` on the ray from `p` toward `xi`.
    fn ray_point(&self, p: &ModelPoint, xi: &IdealPoint, t: f64) -> Result<ModelPoint>;

    /// Angle at `p` between the initial directions toward `a` and `b`.
    fn angle_at(&self, p: &ModelPoint, a: Target, b: Target) -> Result<f64>;

    /// Base of the cone, isometric to its Tits boundary.
    fn base(&self) -> &SpaceDescriptor {
        self.space().base().expect("cone spaces have a base")
    }
}

impl ConeModel for FlatCone {
    fn space(&self) -> &SpaceDescriptor {
        FlatCone::space(self)
    }

    fn geodesic_point(&self, p: &ModelPoint, q: &ModelPoint, s: f64) -> Result<ModelPoint> {
        self.geodesic(p, q)?.point_at(self, s)
    }

    fn apex_parameter(&self, p: &ModelPoint, q: &ModelPoint) -> Result<Option<f64>> {
        Ok(self.geodesic(p, q)?.apex_parameter)
    }

    fn ray_point(&self, p: &ModelPoint, xi: &IdealPoint, t: f64) -> Result<ModelPoint> {
        self.ray(p, xi)?.point_at(self, t)
    }

    fn angle_at(&self, p: &ModelPoint, a: Target, b: Target) -> Result<f64> {
        FlatCone::angle_at(self, p, a, b)
    }
}

impl ConeModel for SuspensionCone {
    fn space(&self) -> &SpaceDescriptor {
        SuspensionCone::space(self)
    }

    fn geodesic_point(&self, p: &ModelPoint, q: &ModelPoint, s: f64) -> Result<ModelPoint> {
        SuspensionCone::geodesic_point(self, p, q, s)
    }

    fn apex_parameter(&self, p: &ModelPoint, q: &ModelPoint) -> Result<Option<f64>> {
        SuspensionCone::apex_parameter(self, p, q)
    }

    fn ray_point(&self, p: &ModelPoint, xi: &IdealPoint, t: f64) -> Result<ModelPoint> {
        SuspensionCone::ray_point(self, p, xi, t)
    }

    fn angle_at(&self, p: &ModelPoint, a: Target, b: Target) -> Result<f64> {
        SuspensionCone::angle_at(self, p, a, b)
    }
}

/// Geometric model for a cone descriptor: flat cones over circles and cones
/// over suspensions of circles. Cones over graphs support distances only.
pub fn cone_model(space: &SpaceDescriptor) -> Result<Box<dyn ConeModel>> {
    match space.base() {
        Some(SpaceDescriptor::Circle { .. })
            if matches!(space, SpaceDescriptor::EuclideanCone(_)) =>
        {
            Ok(Box::new(FlatCone::from_space(space)?))
        }
        Some(SpaceDescriptor::Suspension(_))
            if matches!(space, SpaceDescriptor::EuclideanCone(_)) =>
        {
            Ok(Box::new(SuspensionCone::from_space(space)?))
        }
        _ => Err(contract(
            "geodesic geometry is available for cones over circles and over suspensions of circles",
        )),
    }
}
