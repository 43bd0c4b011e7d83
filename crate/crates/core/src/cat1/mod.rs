//! CAT(1) side: curvature admissibility of model spaces, antipodes and polar
//! sets, and the detection and certification of (m, δ)-suspenders.
//!
//! Every admissible model is geodesically complete with at least two points,
//! hence penetrable; that property is assumed rather than tested.

mod join;
mod search;
mod suspender;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::contract;
use crate::metric::{ModelPoint, PreparedSample, SampleSet, SpaceDescriptor, GEOMETRIC_TOL};
use crate::Result;

pub use join::{check_exact_suspender, verify_join_splitting, JoinReport};
pub use search::{
    find_suspender, max_suspender_order, SuspenderOrder, SuspenderSearch, DEFAULT_SEARCH_BUDGET,
};
pub use suspender::{
    aperp_check, certify_suspender, fullsusp_gap, verify_suspender_conclusions, AperpReport,
    ConclusionReport, GapReport, Residual, SuspenderCertificate, SuspenderProfile,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cat1Report {
    pub admissible: bool,
    /// Length of the shortest closed curve that decides admissibility, if any.
    pub shortest_cycle: Option<f64>,
    pub geodesically_complete: bool,
}

/// Decides whether a model space is CAT(1) by the girth criterion: a circle
/// or graph is CAT(1) exactly when every cycle has length at least 2π, and a
/// suspension inherits the property from its base.
pub fn admits_cat1(space: &SpaceDescriptor) -> Result<Cat1Report> {
    let ok = |girth: Option<f64>| girth.is_none_or(|g| g >= 2.0 * PI - GEOMETRIC_TOL);
    match space {
        SpaceDescriptor::Circle { length } => Ok(Cat1Report {
            admissible: ok(Some(*length)),
            shortest_cycle: Some(*length),
            geodesically_complete: true,
        }),
        SpaceDescriptor::MetricGraph(g) => {
            let girth = g.girth();
            Ok(Cat1Report {
                admissible: ok(girth),
                shortest_cycle: girth,
                geodesically_complete: (0..g.vertex_count()).all(|v| g.degree(v) != 1),
            })
        }
        SpaceDescriptor::Suspension(base) => {
            let inner = admits_cat1(base)?;
            Ok(Cat1Report {
                geodesically_complete: true,
                ..inner
            })
        }
        SpaceDescriptor::RoundSphere { .. } => Ok(Cat1Report {
            admissible: true,
            shortest_cycle: Some(2.0 * PI),
            geodesically_complete: true,
        }),
        _ => Err(contract(
            "CAT(1) admissibility is decided for circles, graphs, suspensions and spheres",
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntipodeReport {
    pub query: ModelPoint,
    pub candidates: Vec<ModelPoint>,
    pub tolerance: f64,
}

/// Sample points at distance at least π − `tol` from `z`.
pub fn antipode_set(
    space: &SpaceDescriptor,
    z: &ModelPoint,
    sample: &SampleSet,
    tol: f64,
) -> Result<AntipodeReport> {
    if sample.is_empty() {
        return Err(contract("antipode search needs a nonempty sample"));
    }
    let prep = PreparedSample::new(space, &sample.points)?;
    let zq = prep.prepare(z)?;
    let candidates = (0..prep.len())
        .filter(|&i| prep.dist_to(i, &zq) >= PI - tol)
        .map(|i| sample.points[i].clone())
        .collect();
    Ok(AntipodeReport {
        query: z.clone(),
        candidates,
        tolerance: tol,
    })
}

/// Sample points at distance at least π/2 − `tol` from every point of `set`.
pub fn polar_set(
    space: &SpaceDescriptor,
    set: &[ModelPoint],
    sample: &SampleSet,
    tol: f64,
) -> Result<Vec<ModelPoint>> {
    if set.is_empty() {
        return Err(contract("polar set of an empty set"));
    }
    if sample.is_empty() {
        return Err(contract("polar set needs a nonempty sample"));
    }
    let prep = PreparedSample::new(space, &sample.points)?;
    let anchors = set
        .iter()
        .map(|a| prep.prepare(a))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..prep.len())
        .filter(|&i| anchors.iter().all(|a| prep.dist_to(i, a) >= PI / 2.0 - tol))
        .map(|i| sample.points[i].clone())
        .collect())
}
