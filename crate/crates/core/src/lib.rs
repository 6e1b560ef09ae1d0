//! Partition-based motion planners on fibered products, with numerical
//! certification.
//!
//! Given maps `f, g : X -> Z`, the fibered product
//! `X x_Z X = {(x, y) : f(x) = g(y)}` collects the query pairs a constrained
//! motion planner must serve.  A planner here is a finite partition of such a
//! domain into pieces, each carrying a continuous section that assigns every
//! pair `(x, y)` a path from `x` to `y` (or a loop through both points, in
//! the loop variants).  The number of pieces witnesses an upper bound for the
//! associated topological complexity.
//!
//! The crate provides:
//!
//! - model spaces (spheres, tori, projective spaces, the Klein bottle,
//!   cylinders) with intrinsic metrics and seeded samplers ([`geometry`]);
//! - explicit parametrized paths with reversal, concatenation, and geodesics
//!   ([`paths`]);
//! - planner construction and transformation: builtins, restriction,
//!   transport along bundle isomorphisms and fiberwise homotopy
//!   equivalences, domination, products, loop variants, and conversions to
//!   and from categorical covers ([`planner`]);
//! - sampling-based certification of the planner contracts ([`verify`]);
//! - a JSON scenario layer driving all of the above ([`scenario`]).

pub mod error;
pub mod geometry;
pub mod paths;
pub mod planner;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};

/// Commonly used items in one import.
pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{
        seeded_rng, FiberedDomain, MapSpec, PairSampler, Point, Space, EPS_SPACE, FIBER_TOL,
    };
    pub use crate::paths::{geodesic, ParamPath, PathMode};
    pub use crate::planner::{
        circle_planner, diagonal_planner, product_planner, sphere_antipodal_planner, CatWitness,
        HomotopySpec, Piece, Planner, PlannerMode, Provenance,
    };
    pub use crate::verify::{verify_planner, VerificationConfig, VerificationReport};
}
