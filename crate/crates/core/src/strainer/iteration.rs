use serde::Serialize;

use crate::error::contract;
use crate::metric::ModelPoint;
use crate::{Error, Result};

use super::{l1, l2, StrainerMap};

/// Record of one run of the openness iteration. Entry k of the residual
/// vectors belongs to iterate y_k; `step_distance[k]` and `ratio[k]` compare
/// y_{k+1} with y_k.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct IterationTrace {
    pub iterates: Vec<ModelPoint>,
    pub residual_l1: Vec<f64>,
    pub residual_l2: Vec<f64>,
    pub step_distance: Vec<f64>,
    pub ratio: Vec<f64>,
}

/// One CSV row: (k, residual_l1, residual_l2, step_distance, ratio). The
/// last two are empty for k = 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: usize,
    pub residual_l1: f64,
    pub residual_l2: f64,
    pub step_distance: Option<f64>,
    pub ratio: Option<f64>,
}

impl IterationTrace {
    pub fn steps(&self) -> usize {
        self.step_distance.len()
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_l2.last().copied().unwrap_or(0.0)
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratio.iter().copied().fold(0.0, f64::max)
    }

    /// Σ d(y_k, y_{k+1}), an upper bound for d(x₀, y_last).
    pub fn path_length(&self) -> f64 {
        self.step_distance.iter().sum()
    }

    pub fn rows(&self) -> Vec<TraceRow> {
        (0..self.residual_l1.len())
            .map(|k| TraceRow {
                k,
                residual_l1: self.residual_l1[k],
                residual_l2: self.residual_l2[k],
                step_distance: k.checked_sub(1).map(|j| self.step_distance[j]),
                ratio: k.checked_sub(1).map(|j| self.ratio[j]),
            })
            .collect()
    }
}

/// Solves φ(y) = φ(x₀) + u₀ by successive coordinate moves along rays.
///
/// Each sweep moves, for i = 1..m in turn, a distance |u_i| along the ray
/// toward ξ_i when the coordinate must drop and toward η_i when it must
/// rise, where u is the residual at the start of the sweep. On a strainer
/// with 2(m−1)δ < 1 the ℓ¹ residual contracts at least by that factor.
pub fn openness_iteration(
    sm: &StrainerMap,
    x0: &ModelPoint,
    u0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(ModelPoint, IterationTrace)> {
    let m = sm.m();
    if u0.len() != m {
        return Err(contract(format!(
            "offset has {} entries, map has {m}",
            u0.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(contract("iteration tolerance must be positive"));
    }
    if 2.0 * (m as f64 - 1.0) * sm.delta() >= 1.0 {
        return Err(contract("openness iteration needs 2(m − 1)δ < 1"));
    }
    let model = sm.model()?;
    let target: Vec<f64> = sm
        .evaluate(x0)?
        .iter()
        .zip(u0)
        .map(|(a, b)| a + b)
        .collect();
    let residual = |y: &ModelPoint| -> Result<Vec<f64>> {
        Ok(target
            .iter()
            .zip(sm.evaluate(y)?)
            .map(|(t, v)| t - v)
            .collect())
    };

    let mut trace = IterationTrace::default();
    let mut y = x0.clone();
    let mut u = u0.to_vec();
    loop {
        let (n1, n2) = (l1(&u), l2(&u));
        if let Some(&prev) = trace.residual_l1.last() {
            let ratio = if prev > 0.0 { n1 / prev } else { 0.0 };
            trace.ratio.push(ratio);
            if ratio >= 1.0 && n2 > tol {
                trace.iterates.push(y);
                trace.residual_l1.push(n1);
                trace.residual_l2.push(n2);
                return Err(Error::Divergence {
                    step: trace.steps(),
                    ratio,
                    trace: Box::new(trace),
                });
            }
        }
        trace.iterates.push(y.clone());
        trace.residual_l1.push(n1);
        trace.residual_l2.push(n2);
        if n2 <= tol {
            return Ok((y, trace));
        }
        if trace.steps() >= max_iter {
            return Err(Error::MaxIterations {
                max_iter,
                trace: Box::new(trace),
            });
        }
        let mut next = y.clone();
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            let toward = if ui < 0.0 { &sm.xi()[i] } else { &sm.eta()[i] };
            next = model.ray_point(&next, toward, ui.abs())?;
        }
        trace.step_distance.push(model.distance(&y, &next)?);
        y = next;
        u = residual(&y)?;
    }
}
