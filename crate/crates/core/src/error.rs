use thiserror::Error;

use crate::metric::ModelPoint;
use crate::strainer::IterationTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point, descriptor or argument does not satisfy an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid space descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("net would hold {requested} points, above the cap of {cap}")]
    SizeLimit { requested: usize, cap: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The suspender search ran out of node budget. Carries the deepest
    /// partial tuple reached, first in lexicographic order.
    #[error("search budget of {budget} nodes exhausted; deepest partial tuple has {} pairs", best_partial.len())]
    Budget {
        budget: u64,
        best_partial: Vec<(ModelPoint, ModelPoint)>,
    },

    #[error("openness iteration stopped contracting at step {step} (ratio {ratio:.6})")]
    Divergence {
        step: usize,
        ratio: f64,
        trace: Box<IterationTrace>,
    },

    #[error("openness iteration did not reach tolerance within {max_iter} steps")]
    MaxIterations {
        max_iter: usize,
        trace: Box<IterationTrace>,
    },

    /// The unnormalized sphere map vanishes (or nearly so) at a sample point.
    #[error("strainer map has norm {norm:e} at {point}; cannot normalize")]
    Normalization { point: ModelPoint, norm: f64 },

    #[error("finite-difference step of the geodesic crosses the apex")]
    StepDegeneracy,

    #[error("no qualifying configurations: {0}")]
    EmptyDomain(String),

    /// No correspondence family is registered and the fallback exceeded its budget.
    #[error("no correspondence family for this pair of spaces: {0}")]
    NoFamily(String),
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
