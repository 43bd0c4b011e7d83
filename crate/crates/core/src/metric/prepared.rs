//! Point representations with cached trigonometry, for pair scans that
//! evaluate the same points many times.

use std::f64::consts::PI;

use crate::Result;

use super::space::{circle_distance, cone_law, sphere_angle, suspension_law};
use super::{ModelPoint, SpaceDescriptor};

#[derive(Debug, Clone)]
pub enum Prepared {
    Angle(f64),
    Edge(usize, f64),
    Polar {
        cos: f64,
        sin: f64,
        base: Box<Prepared>,
    },
    Radial {
        radius: f64,
        base: Box<Prepared>,
    },
    Coords(Vec<f64>),
}

impl Prepared {
    /// Prepares a point after checking that it belongs to `space`.
    pub fn new(space: &SpaceDescriptor, p: &ModelPoint) -> Result<Self> {
        space.normalize(p)?;
        Ok(Self::build(p))
    }

    fn build(p: &ModelPoint) -> Self {
        match p {
            ModelPoint::Angle(a) => Prepared::Angle(*a),
            ModelPoint::OnEdge { edge, offset } => Prepared::Edge(*edge, *offset),
            ModelPoint::Polar { polar, base } => {
                let (sin, cos) = polar.sin_cos();
                Prepared::Polar {
                    cos,
                    sin,
                    base: Box::new(Self::build(base)),
                }
            }
            ModelPoint::Radial { radius, base } => Prepared::Radial {
                radius: *radius,
                base: Box::new(Self::build(base)),
            },
            ModelPoint::Coords(v) => Prepared::Coords(v.clone()),
        }
    }
}

/// Distance between prepared points. Both must come from `space`.
pub fn prepared_distance(space: &SpaceDescriptor, a: &Prepared, b: &Prepared) -> f64 {
    match (space, a, b) {
        (SpaceDescriptor::Circle { length }, Prepared::Angle(x), Prepared::Angle(y)) => {
            circle_distance(*length, *x, *y)
        }
        (SpaceDescriptor::MetricGraph(g), Prepared::Edge(e1, o1), Prepared::Edge(e2, o2)) => {
            g.point_distance((*e1, *o1), (*e2, *o2))
        }
        (
            SpaceDescriptor::Suspension(base),
            Prepared::Polar {
                cos: c1,
                sin: n1,
                base: x1,
            },
            Prepared::Polar {
                cos: c2,
                sin: n2,
                base: x2,
            },
        ) => {
            let theta = prepared_distance(base, x1, x2).min(PI);
            suspension_law(*c1, *n1, *c2, *n2, theta)
        }
        (
            SpaceDescriptor::EuclideanCone(base),
            Prepared::Radial {
                radius: t1,
                base: x1,
            },
            Prepared::Radial {
                radius: t2,
                base: x2,
            },
        ) => {
            let theta = prepared_distance(base, x1, x2).min(PI);
            cone_law(*t1, *t2, theta)
        }
        (SpaceDescriptor::RoundSphere { .. }, Prepared::Coords(x), Prepared::Coords(y)) => {
            sphere_angle(x, y)
        }
        (SpaceDescriptor::Euclidean { .. }, Prepared::Coords(x), Prepared::Coords(y)) => x
            .iter()
            .zip(y)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt(),
        _ => f64::NAN,
    }
}

/// A validated list of points of one space, ready for repeated distance queries.
#[derive(Debug, Clone)]
pub struct PreparedSample<'a> {
    space: &'a SpaceDescriptor,
    points: Vec<Prepared>,
}

impl<'a> PreparedSample<'a> {
    pub fn new(space: &'a SpaceDescriptor, points: &[ModelPoint]) -> Result<Self> {
        let points = points
            .iter()
            .map(|p| Prepared::new(space, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, points })
    }

    pub fn space(&self) -> &'a SpaceDescriptor {
        self.space
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        prepared_distance(self.space, &self.points[i], &self.points[j])
    }

    pub fn prepare(&self, p: &ModelPoint) -> Result<Prepared> {
        Prepared::new(self.space, p)
    }

    pub fn dist_to(&self, i: usize, p: &Prepared) -> f64 {
        prepared_distance(self.space, &self.points[i], p)
    }

    pub fn dist_between(&self, a: &Prepared, b: &Prepared) -> f64 {
        prepared_distance(self.space, a, b)
    }
}
