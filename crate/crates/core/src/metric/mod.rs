//! Model metric spaces: descriptors, points, distances, nets and rescaling.

mod graph;
mod index;
mod net;
mod prepared;
mod space;
mod text;

pub use graph::{Edge, MetricGraph};
pub use index::VpTree;
pub use net::{diameter_bounds, epsilon_net, epsilon_net_with_cap, SampleSet, DEFAULT_NET_CAP};
pub use prepared::{prepared_distance, Prepared, PreparedSample};
pub use space::{
    circle_distance, cone_law, distance, rescale, sphere_angle, suspension_law, truncated_distance,
    ModelPoint, SpaceDescriptor, GEOMETRIC_TOL, MAX_NESTING,
};
pub use text::parse_length;
