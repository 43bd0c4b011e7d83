use std::f64::consts::PI;

use serde::Serialize;

use crate::error::contract;
use crate::{Error, Result};

use super::prepared::PreparedSample;
use super::{ModelPoint, SpaceDescriptor};

/// Default ceiling on the number of points a net may hold.
pub const DEFAULT_NET_CAP: usize = 2_000_000;

/// Finite ε-net standing in for a dense subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub points: Vec<ModelPoint>,
    /// Covering radius: every point of the sampled region lies within `mesh` of a sample.
    pub mesh: f64,
    pub seed: u64,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// ε-net of `space`, or of its ball of radius `radius_cap` around the apex
/// (origin) for cones and Euclidean spaces.
///
/// Nets are regular grids, so the seed only labels the result. Composite
/// spaces are sampled ring by ring; circle rings use a multiple of four
/// points so that antipodal and orthogonal partners are present exactly.
pub fn epsilon_net(
    space: &SpaceDescriptor,
    radius_cap: Option<f64>,
    eps: f64,
    seed: u64,
) -> Result<SampleSet> {
    epsilon_net_with_cap(space, radius_cap, eps, seed, DEFAULT_NET_CAP)
}

pub fn epsilon_net_with_cap(
    space: &SpaceDescriptor,
    radius_cap: Option<f64>,
    eps: f64,
    seed: u64,
    cap: usize,
) -> Result<SampleSet> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(contract(format!("net spacing must be positive, got {eps}")));
    }
    let mut budget = Budget { cap, used: 0 };
    let (points, mesh) = match space {
        SpaceDescriptor::Circle { length } => {
            let n = (length / (2.0 * eps)).ceil().max(1.0) as usize;
            budget.take(n)?;
            let step = length / n as f64;
            (
                (0..n).map(|j| ModelPoint::Angle(j as f64 * step)).collect(),
                length / (2.0 * n as f64),
            )
        }
        SpaceDescriptor::MetricGraph(_) => {
            let mut mesh: f64 = 0.0;
            let pts = graph_net(space, eps, &mut budget, &mut mesh)?;
            (pts, mesh)
        }
        SpaceDescriptor::RoundSphere { dim: 1 } => {
            let n = ring_count(2.0 * PI, eps);
            budget.take(n)?;
            let step = 2.0 * PI / n as f64;
            let pts = (0..n)
                .map(|j| {
                    let (s, c) = (j as f64 * step).sin_cos();
                    ModelPoint::Coords(vec![c, s])
                })
                .collect();
            (pts, PI / n as f64)
        }
        SpaceDescriptor::EuclideanCone(_) | SpaceDescriptor::Euclidean { .. } => {
            let r = radius_cap
                .ok_or_else(|| contract("unbounded spaces need a radius cap for sampling"))?;
            if !(r.is_finite() && r > 0.0) {
                return Err(contract(format!("radius cap must be positive, got {r}")));
            }
            (covering(space, Some(r), eps, &mut budget)?, eps)
        }
        _ => (covering(space, None, eps, &mut budget)?, eps),
    };
    Ok(SampleSet { points, mesh, seed })
}

struct Budget {
    cap: usize,
    used: usize,
}

impl Budget {
    fn take(&mut self, n: usize) -> Result<()> {
        self.used = self.used.saturating_add(n);
        if self.used > self.cap {
            Err(Error::SizeLimit {
                requested: self.used,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }
}

/// Smallest multiple of four points whose spacing covers a circle at radius `r`.
fn ring_count(length: f64, r: f64) -> usize {
    let k = (length / (8.0 * r)).ceil().max(1.0) as usize;
    4 * k
}

fn graph_net(
    space: &SpaceDescriptor,
    r: f64,
    budget: &mut Budget,
    mesh: &mut f64,
) -> Result<Vec<ModelPoint>> {
    let SpaceDescriptor::MetricGraph(g) = space else {
        unreachable!()
    };
    let mut pts: Vec<ModelPoint> = Vec::new();
    for v in 0..g.vertex_count() {
        if let Ok(p) = space.vertex(v) {
            budget.take(1)?;
            pts.push(p);
        }
    }
    for (i, e) in g.edges().iter().enumerate() {
        let k = (e.length / (2.0 * r)).ceil().max(1.0) as usize;
        *mesh = mesh.max(e.length / (2.0 * k as f64));
        budget.take(k.saturating_sub(1))?;
        for j in 1..k {
            pts.push(ModelPoint::OnEdge {
                edge: i,
                offset: e.length * j as f64 / k as f64,
            });
        }
    }
    Ok(pts)
}

/// Points covering `space` (capped at `cap` for unbounded spaces) within `r`.
fn covering(
    space: &SpaceDescriptor,
    cap: Option<f64>,
    r: f64,
    budget: &mut Budget,
) -> Result<Vec<ModelPoint>> {
    match space {
        SpaceDescriptor::Circle { length } => {
            let n = ring_count(*length, r);
            budget.take(n)?;
            let step = length / n as f64;
            Ok((0..n).map(|j| ModelPoint::Angle(j as f64 * step)).collect())
        }
        SpaceDescriptor::MetricGraph(_) => {
            let mut mesh = 0.0;
            graph_net(space, r, budget, &mut mesh)
        }
        SpaceDescriptor::Suspension(base) => {
            // Rings at polar spacing ≤ r√2. A point at polar s within a ≤ r/√2
            // of ring s_j and base distance ≤ θ from a ring sample satisfies
            // sin²(d/2) = sin²(Δs/2) + sin s sin s_j sin²(θ/2) ≤ sin²(r/2).
            let a = r / 2f64.sqrt();
            let k = 2 * (PI / (4.0 * a)).ceil().max(1.0) as usize;
            let half = PI / (2.0 * k as f64);
            let slack = (0.5 * r).sin().powi(2) - (0.5 * half).sin().powi(2);
            let mut pts = Vec::new();
            for j in 0..=k {
                let s = j as f64 * PI / k as f64;
                if j == 0 || j == k {
                    budget.take(1)?;
                    pts.push(space.polar_point(s, base.sentinel())?);
                    continue;
                }
                let ns = s.sin();
                let bound = slack / (ns * (ns + half).min(1.0));
                let theta = 2.0 * bound.sqrt().min(1.0).asin();
                for x in covering(base, None, theta, budget)? {
                    pts.push(ModelPoint::Polar {
                        polar: s,
                        base: Box::new(x),
                    });
                }
            }
            Ok(pts)
        }
        SpaceDescriptor::EuclideanCone(base) => {
            // Radii at spacing r√2; for ring t_j the base covering radius θ with
            // t_j (t_j + a) θ² ≤ r²/2 keeps every point within r.
            let cap = cap.ok_or_else(|| contract("cone sampling needs a radius cap"))?;
            let a = r / 2f64.sqrt();
            let rings = (cap / (2.0 * a)).ceil() as usize;
            let mut pts = Vec::new();
            budget.take(1)?;
            pts.push(space.apex()?);
            for j in 1..=rings {
                let t = 2.0 * a * j as f64;
                let theta = a / (t * (t + a)).sqrt();
                for x in covering(base, None, theta, budget)? {
                    pts.push(ModelPoint::Radial {
                        radius: t,
                        base: Box::new(x),
                    });
                }
            }
            Ok(pts)
        }
        SpaceDescriptor::RoundSphere { dim } => sphere_net(*dim, r, budget),
        SpaceDescriptor::Euclidean { dim } => {
            let cap = cap.ok_or_else(|| contract("Euclidean sampling needs a radius cap"))?;
            let d = *dim;
            let h = 2.0 * r / (d as f64).sqrt();
            let reach = cap + r;
            let m = (reach / h).ceil() as i64;
            let side = (2 * m + 1) as usize;
            let total = side.checked_pow(d as u32).unwrap_or(usize::MAX);
            if total > budget.cap {
                return Err(Error::SizeLimit {
                    requested: total,
                    cap: budget.cap,
                });
            }
            let mut pts = Vec::new();
            let mut idx = vec![-m; d];
            loop {
                let v: Vec<f64> = idx.iter().map(|&i| i as f64 * h).collect();
                if v.iter().map(|x| x * x).sum::<f64>().sqrt() <= reach {
                    budget.take(1)?;
                    pts.push(ModelPoint::Coords(v));
                }
                let mut k = 0;
                loop {
                    if k == d {
                        return Ok(pts);
                    }
                    idx[k] += 1;
                    if idx[k] <= m {
                        break;
                    }
                    idx[k] = -m;
                    k += 1;
                }
            }
        }
    }
}

/// Radial projection of a grid on each face of the cube [−1, 1]^{dim+1}.
/// Projection from the face onto the sphere is 1-Lipschitz, so a face grid
/// with half-cell diagonal ≤ r covers the sphere within r. An odd number of
/// cells per side puts the coordinate vectors ±e_i in the net.
fn sphere_net(dim: usize, r: f64, budget: &mut Budget) -> Result<Vec<ModelPoint>> {
    if dim == 1 {
        let n = ring_count(2.0 * PI, r);
        budget.take(n)?;
        let step = 2.0 * PI / n as f64;
        return Ok((0..n)
            .map(|j| {
                let (s, c) = (j as f64 * step).sin_cos();
                ModelPoint::Coords(vec![c, s])
            })
            .collect());
    }
    let mut k = ((dim as f64).sqrt() / r).ceil().max(1.0) as usize;
    if k.is_multiple_of(2) {
        k += 1;
    }
    let per_face = k.checked_pow(dim as u32).unwrap_or(usize::MAX);
    budget.take(per_face.saturating_mul(2 * (dim + 1)))?;
    let grid: Vec<f64> = (0..k)
        .map(|j| -1.0 + (2 * j + 1) as f64 / k as f64)
        .collect();
    let mut pts = Vec::with_capacity(per_face * 2 * (dim + 1));
    for axis in 0..=dim {
        for sign in [1.0, -1.0] {
            let mut idx = vec![0usize; dim];
            loop {
                let mut v = Vec::with_capacity(dim + 1);
                let mut it = idx.iter();
                for c in 0..=dim {
                    if c == axis {
                        v.push(sign);
                    } else {
                        v.push(grid[*it.next().expect("dim coordinates")]);
                    }
                }
                let n = super::space::norm(&v);
                pts.push(ModelPoint::Coords(v.iter().map(|x| x / n).collect()));
                let mut c = 0;
                while c < dim {
                    idx[c] += 1;
                    if idx[c] < k {
                        break;
                    }
                    idx[c] = 0;
                    c += 1;
                }
                if c == dim {
                    break;
                }
            }
        }
    }
    Ok(pts)
}

/// Sampled diameter with its certified upper bound: `lower` is the largest
/// pairwise sample distance and the true diameter is at most `lower + 2·mesh`.
pub fn diameter_bounds(space: &SpaceDescriptor, sample: &SampleSet) -> Result<(f64, f64)> {
    if !space.is_compact() {
        return Err(contract("diameter bounds need a bounded space"));
    }
    if sample.is_empty() {
        return Err(contract("diameter bounds need a nonempty sample"));
    }
    let prep = PreparedSample::new(space, &sample.points)?;
    let lower = crate::pairs::max_over_pairs(prep.len(), |i, j| prep.dist(i, j));
    Ok((lower, lower + 2.0 * sample.mesh))
}
