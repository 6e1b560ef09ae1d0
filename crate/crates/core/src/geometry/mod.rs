//! Spaces, points, tagged maps, and pair domains.

pub(crate) mod domain;
mod map;
mod space;

pub use domain::{
    antipodal_graph_sampler, FiberedDomain, PairPredicate, PairSampler, PointMap, FIBER_TOL,
    REJECTION_BUDGET,
};
pub use map::{MapSpec, MapTag};
pub use space::{
    derive_seed, seeded_rng, CanonicalRule, OrbitMap, Point, Space, EPS_SPACE, SIGN_SCAN_TOL,
};
