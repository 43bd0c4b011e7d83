use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::contract;
use crate::{Error, Result};

use super::graph::{Edge, MetricGraph};

/// Global tolerance for geometric equality and comparisons against π.
pub const GEOMETRIC_TOL: f64 = 1e-9;

/// Deepest supported composite: a cone over a suspension over a circle.
pub const MAX_NESTING: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceDescriptor {
    Circle { length: f64 },
    MetricGraph(MetricGraph),
    Suspension(Box<SpaceDescriptor>),
    EuclideanCone(Box<SpaceDescriptor>),
    RoundSphere { dim: usize },
    Euclidean { dim: usize },
}

/// Coordinates of a point in a model space. Build them through the
/// constructors on [`SpaceDescriptor`], which normalize apex and pole
/// representations so that equal points compare equal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ModelPoint {
    Angle(f64),
    OnEdge { edge: usize, offset: f64 },
    Polar { polar: f64, base: Box<ModelPoint> },
    Radial { radius: f64, base: Box<ModelPoint> },
    Coords(Vec<f64>),
}

impl ModelPoint {
    /// Radius of a cone point, if this is one.
    pub fn radius(&self) -> Option<f64> {
        match self {
            ModelPoint::Radial { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    pub fn base(&self) -> Option<&ModelPoint> {
        match self {
            ModelPoint::Radial { base, .. } | ModelPoint::Polar { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            ModelPoint::Angle(a) => Some(*a),
            _ => None,
        }
    }

    pub fn is_apex(&self) -> bool {
        matches!(self, ModelPoint::Radial { radius, .. } if *radius == 0.0)
    }
}

impl fmt::Display for ModelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelPoint::Angle(a) => write!(f, "angle({a})"),
            ModelPoint::OnEdge { edge, offset } => write!(f, "edge({edge}:{offset})"),
            ModelPoint::Polar { polar, base } => write!(f, "polar({polar};{base})"),
            ModelPoint::Radial { radius, base } => write!(f, "radial({radius};{base})"),
            ModelPoint::Coords(v) => {
                write!(f, "coords(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl SpaceDescriptor {
    pub fn circle(length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidDescriptor(format!(
                "circle length must be positive, got {length}"
            )));
        }
        Ok(SpaceDescriptor::Circle { length })
    }

    pub fn graph(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        MetricGraph::new(vertex_count, edges).map(SpaceDescriptor::MetricGraph)
    }

    /// The theta graph: two vertices joined by three edges.
    pub fn theta(a: f64, b: f64, c: f64) -> Result<Self> {
        let e = |length| Edge { a: 0, b: 1, length };
        Self::graph(2, vec![e(a), e(b), e(c)])
    }

    pub fn suspension(base: SpaceDescriptor) -> Result<Self> {
        Self::check_composite_base(&base, "suspension")?;
        let s = SpaceDescriptor::Suspension(Box::new(base));
        s.check_depth()?;
        Ok(s)
    }

    pub fn cone(base: SpaceDescriptor) -> Result<Self> {
        Self::check_composite_base(&base, "cone")?;
        let s = SpaceDescriptor::EuclideanCone(Box::new(base));
        s.check_depth()?;
        Ok(s)
    }

    pub fn round_sphere(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDescriptor(
                "sphere dimension must be ≥ 1".into(),
            ));
        }
        Ok(SpaceDescriptor::RoundSphere { dim })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDescriptor(
                "Euclidean dimension must be ≥ 1".into(),
            ));
        }
        Ok(SpaceDescriptor::Euclidean { dim })
    }

    fn check_composite_base(base: &SpaceDescriptor, what: &str) -> Result<()> {
        if base.is_compact() {
            Ok(())
        } else {
            Err(Error::InvalidDescriptor(format!(
                "{what} base must be a bounded space"
            )))
        }
    }

    fn check_depth(&self) -> Result<()> {
        if self.depth() > MAX_NESTING {
            Err(Error::InvalidDescriptor(format!(
                "nesting depth {} exceeds {MAX_NESTING}",
                self.depth()
            )))
        } else {
            Ok(())
        }
    }

    /// Number of composite constructors wrapped around the innermost space.
    pub fn depth(&self) -> usize {
        match self {
            SpaceDescriptor::Suspension(b) | SpaceDescriptor::EuclideanCone(b) => 1 + b.depth(),
            _ => 0,
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(
            self,
            SpaceDescriptor::EuclideanCone(_) | SpaceDescriptor::Euclidean { .. }
        )
    }

    /// Base of a suspension or cone.
    pub fn base(&self) -> Option<&SpaceDescriptor> {
        match self {
            SpaceDescriptor::Suspension(b) | SpaceDescriptor::EuclideanCone(b) => Some(b),
            _ => None,
        }
    }

    pub fn circle_length(&self) -> Option<f64> {
        match self {
            SpaceDescriptor::Circle { length } => Some(*length),
            _ => None,
        }
    }

    /// Fixed representative used for the base coordinate of apexes and poles.
    pub fn sentinel(&self) -> ModelPoint {
        match self {
            SpaceDescriptor::Circle { .. } => ModelPoint::Angle(0.0),
            SpaceDescriptor::MetricGraph(g) => {
                let (edge, offset) = g.vertex_point(g.edges()[0].a).expect("edge 0 exists");
                ModelPoint::OnEdge { edge, offset }
            }
            SpaceDescriptor::Suspension(b) => ModelPoint::Polar {
                polar: 0.0,
                base: Box::new(b.sentinel()),
            },
            SpaceDescriptor::EuclideanCone(b) => ModelPoint::Radial {
                radius: 0.0,
                base: Box::new(b.sentinel()),
            },
            SpaceDescriptor::RoundSphere { dim } => {
                let mut v = vec![0.0; dim + 1];
                v[0] = 1.0;
                ModelPoint::Coords(v)
            }
            SpaceDescriptor::Euclidean { dim } => ModelPoint::Coords(vec![0.0; *dim]),
        }
    }

    /// Validates `p` against this space and returns its canonical form.
    pub fn normalize(&self, p: &ModelPoint) -> Result<ModelPoint> {
        match (self, p) {
            (SpaceDescriptor::Circle { length }, ModelPoint::Angle(a)) => {
                if !a.is_finite() {
                    return Err(contract("angle must be finite"));
                }
                let mut r = a.rem_euclid(*length);
                if r >= *length {
                    r = 0.0;
                }
                Ok(ModelPoint::Angle(r))
            }
            (SpaceDescriptor::MetricGraph(g), ModelPoint::OnEdge { edge, offset }) => {
                let (edge, offset) = g.canonical(*edge, *offset)?;
                Ok(ModelPoint::OnEdge { edge, offset })
            }
            (SpaceDescriptor::Suspension(b), ModelPoint::Polar { polar, base }) => {
                let s = *polar;
                if !s.is_finite() || !(-GEOMETRIC_TOL..=PI + GEOMETRIC_TOL).contains(&s) {
                    return Err(contract(format!("polar distance {s} outside [0, π]")));
                }
                if s <= 0.0 || s >= PI {
                    Ok(ModelPoint::Polar {
                        polar: if s <= 0.0 { 0.0 } else { PI },
                        base: Box::new(b.sentinel()),
                    })
                } else {
                    Ok(ModelPoint::Polar {
                        polar: s,
                        base: Box::new(b.normalize(base)?),
                    })
                }
            }
            (SpaceDescriptor::EuclideanCone(b), ModelPoint::Radial { radius, base }) => {
                let t = *radius;
                if !t.is_finite() || t < -GEOMETRIC_TOL {
                    return Err(contract(format!("cone radius {t} is negative")));
                }
                if t <= 0.0 {
                    Ok(ModelPoint::Radial {
                        radius: 0.0,
                        base: Box::new(b.sentinel()),
                    })
                } else {
                    Ok(ModelPoint::Radial {
                        radius: t,
                        base: Box::new(b.normalize(base)?),
                    })
                }
            }
            (SpaceDescriptor::RoundSphere { dim }, ModelPoint::Coords(v)) => {
                if v.len() != dim + 1 {
                    return Err(contract(format!(
                        "sphere of dimension {dim} needs {} coordinates",
                        dim + 1
                    )));
                }
                let n = norm(v);
                if !(n.is_finite() && n > 0.0) {
                    return Err(contract("sphere point must be a nonzero vector"));
                }
                Ok(ModelPoint::Coords(v.iter().map(|x| x / n).collect()))
            }
            (SpaceDescriptor::Euclidean { dim }, ModelPoint::Coords(v)) => {
                if v.len() != *dim || v.iter().any(|x| !x.is_finite()) {
                    return Err(contract(format!("expected {dim} finite coordinates")));
                }
                Ok(p.clone())
            }
            _ => Err(contract(format!("point {p} does not belong to this space"))),
        }
    }

    pub fn angle(&self, a: f64) -> Result<ModelPoint> {
        self.normalize(&ModelPoint::Angle(a))
    }

    pub fn edge_point(&self, edge: usize, offset: f64) -> Result<ModelPoint> {
        self.normalize(&ModelPoint::OnEdge { edge, offset })
    }

    pub fn vertex(&self, v: usize) -> Result<ModelPoint> {
        match self {
            SpaceDescriptor::MetricGraph(g) => {
                let (edge, offset) = g.vertex_point(v)?;
                Ok(ModelPoint::OnEdge { edge, offset })
            }
            _ => Err(contract("vertices exist only in metric graphs")),
        }
    }

    pub fn polar_point(&self, polar: f64, base: ModelPoint) -> Result<ModelPoint> {
        self.normalize(&ModelPoint::Polar {
            polar,
            base: Box::new(base),
        })
    }

    pub fn cone_point(&self, radius: f64, base: ModelPoint) -> Result<ModelPoint> {
        self.normalize(&ModelPoint::Radial {
            radius,
            base: Box::new(base),
        })
    }

    pub fn apex(&self) -> Result<ModelPoint> {
        match self {
            SpaceDescriptor::EuclideanCone(_) => Ok(self.sentinel()),
            _ => Err(contract("only cones have an apex")),
        }
    }

    pub fn coords(&self, v: Vec<f64>) -> Result<ModelPoint> {
        self.normalize(&ModelPoint::Coords(v))
    }

    /// `true` when `p` is a canonical point of this space.
    pub fn contains(&self, p: &ModelPoint) -> bool {
        self.normalize(p).is_ok_and(|q| &q == p)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Shorter-arc distance on a circle of the given length.
pub fn circle_distance(length: f64, a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % length;
    d.min(length - d)
}

/// Cone law in the form that stays accurate for nearby points:
/// d² = (t₁ − t₂)² + 4t₁t₂ sin²(θ/2), with θ already truncated at π.
pub fn cone_law(t1: f64, t2: f64, theta: f64) -> f64 {
    let h = (0.5 * theta).sin();
    ((t1 - t2) * (t1 - t2) + 4.0 * t1 * t2 * h * h).sqrt()
}

/// Spherical-join law for polar coordinates given by their cosines and sines.
/// Computes the angle between the unit vectors of the join embedding from
/// both the chord and the antipodal chord, which keeps it accurate near 0 and π.
pub fn suspension_law(c1: f64, n1: f64, c2: f64, n2: f64, theta: f64) -> f64 {
    let (h, k) = (0.5 * theta).sin_cos();
    let dn = n1 - n2;
    let minus = (c1 - c2) * (c1 - c2) + dn * dn + 4.0 * n1 * n2 * h * h;
    let plus = (c1 + c2) * (c1 + c2) + dn * dn + 4.0 * n1 * n2 * k * k;
    2.0 * minus.sqrt().atan2(plus.sqrt())
}

/// Angle between unit vectors.
pub fn sphere_angle(x: &[f64], y: &[f64]) -> f64 {
    let mut minus = 0.0;
    let mut plus = 0.0;
    for (a, b) in x.iter().zip(y) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    2.0 * minus.sqrt().atan2(plus.sqrt())
}

/// Distance between two points of `space`.
pub fn distance(space: &SpaceDescriptor, p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    match (space, p, q) {
        (SpaceDescriptor::Circle { length }, ModelPoint::Angle(a), ModelPoint::Angle(b)) => {
            Ok(circle_distance(*length, *a, *b))
        }
        (
            SpaceDescriptor::MetricGraph(g),
            ModelPoint::OnEdge {
                edge: e1,
                offset: o1,
            },
            ModelPoint::OnEdge {
                edge: e2,
                offset: o2,
            },
        ) => {
            if *e1 >= g.edges().len() || *e2 >= g.edges().len() {
                return Err(contract("edge id out of range"));
            }
            Ok(g.point_distance((*e1, *o1), (*e2, *o2)))
        }
        (
            SpaceDescriptor::Suspension(b),
            ModelPoint::Polar {
                polar: s1,
                base: x1,
            },
            ModelPoint::Polar {
                polar: s2,
                base: x2,
            },
        ) => {
            let theta = truncated_distance(b, x1, x2)?;
            let (n1, c1) = s1.sin_cos();
            let (n2, c2) = s2.sin_cos();
            Ok(suspension_law(c1, n1, c2, n2, theta))
        }
        (
            SpaceDescriptor::EuclideanCone(b),
            ModelPoint::Radial {
                radius: t1,
                base: x1,
            },
            ModelPoint::Radial {
                radius: t2,
                base: x2,
            },
        ) => {
            let theta = truncated_distance(b, x1, x2)?;
            Ok(cone_law(*t1, *t2, theta))
        }
        (SpaceDescriptor::RoundSphere { dim }, ModelPoint::Coords(x), ModelPoint::Coords(y)) => {
            if x.len() != dim + 1 || y.len() != dim + 1 {
                return Err(contract("coordinate count does not match sphere dimension"));
            }
            Ok(sphere_angle(x, y))
        }
        (SpaceDescriptor::Euclidean { dim }, ModelPoint::Coords(x), ModelPoint::Coords(y)) => {
            if x.len() != *dim || y.len() != *dim {
                return Err(contract("coordinate count does not match dimension"));
            }
            Ok(x.iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt())
        }
        _ => Err(contract(format!(
            "points {p} and {q} do not belong to the given space"
        ))),
    }
}

/// `min(distance, π)`, the metric that enters cone and suspension laws.
pub fn truncated_distance(space: &SpaceDescriptor, p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    distance(space, p, q).map(|d| d.min(PI))
}

/// Multiplies all distances by `lambda`. Only circles and graphs rescale;
/// rescaling a cone or suspension base would change its curvature class.
pub fn rescale(space: &SpaceDescriptor, lambda: f64) -> Result<SpaceDescriptor> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(contract(format!(
            "scale factor must be positive, got {lambda}"
        )));
    }
    match space {
        SpaceDescriptor::Circle { length } => SpaceDescriptor::circle(length * lambda),
        SpaceDescriptor::MetricGraph(g) => Ok(SpaceDescriptor::MetricGraph(g.scaled(lambda))),
        _ => Err(contract("only circles and metric graphs can be rescaled")),
    }
}
