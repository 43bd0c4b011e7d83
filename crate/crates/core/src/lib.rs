//! Exactly computable model spaces of curvature bounded above, and the
//! constructive objects built on them: Euclidean cones, Busemann functions,
//! suspenders and strainers at infinity, Busemann strainer maps, the
//! successive-approximation openness iteration, the normalized sphere map,
//! and certified Gromov–Hausdorff intervals.
//!
//! Every quantity that stands for a supremum or infimum over a whole space is
//! computed on an ε-net and carries an explicit Lipschitz correction, so the
//! reported numbers are certified bounds rather than point estimates.

pub mod busemann;
pub mod cat1;
pub mod cone;
mod error;
pub mod gh;
pub mod metric;
pub mod pairs;
pub mod strainer;

pub use error::{Error, Result};
