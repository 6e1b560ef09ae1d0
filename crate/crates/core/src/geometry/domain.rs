//! Pair domains: subsets of `X x X` that planners are defined on.
//!
//! The central case is the fibered product of two maps `f, g : X -> Z`,
//! namely `{(x, y) : d_Z(f(x), g(y)) <= fiber_tol}`.  The full product is the
//! fibered product of two constant maps, and free-form covering domains are
//! supported through an explicit membership predicate.
//!
//! Several of these sets have measure zero inside `X x X` (diagonals, graphs
//! of involutions, basepoint slices), so each domain carries a structured
//! [`PairSampler`] that produces members parametrically instead of by
//! rejection.  Perturbation for continuity probing moves members within the
//! same parametrization.

use std::fmt;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::map::MapSpec;
use crate::geometry::space::{seeded_rng, Point, Space};

/// Default fibered-membership tolerance.
pub const FIBER_TOL: f64 = 1e-9;

/// Default per-pair attempt budget for rejection sampling.
pub const REJECTION_BUDGET: usize = 1000;

pub type PairPredicate = Arc<dyn Fn(&Point, &Point) -> bool + Send + Sync>;
pub type PointMap = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// How members of a domain are generated and perturbed.
#[derive(Clone)]
pub enum PairSampler {
    /// Independent uniform draws of both coordinates.
    FullProduct,
    /// `(x, x)` for uniform `x`.
    Diagonal,
    /// `(x, sigma(x))` for uniform `x` and a fixed continuous `sigma`.
    Graph { label: String, map: PointMap },
    /// `(base, y)` for uniform `y`.
    BaseSlice { base: Point },
    /// Draws split proportionally across components: draw `i` of `n` comes
    /// from component `i mod k`.
    Union(Vec<PairSampler>),
    /// Pairs of a product space, one sub-pair per factor domain.
    ProductOf {
        left: Box<FiberedDomain>,
        right: Box<FiberedDomain>,
    },
    /// Image of another domain under a bijection with explicit inverse.
    Pushforward {
        inner: Box<FiberedDomain>,
        fwd: MapSpec,
        inv: MapSpec,
    },
    /// Uniform product draws filtered by domain membership, with a budget.
    Rejection { budget: usize },
}

enum DomainKind {
    Fibered {
        f: MapSpec,
        g: MapSpec,
        fiber_tol: f64,
    },
    Custom {
        membership: PairPredicate,
    },
}

struct DomainInner {
    label: String,
    space: Space,
    kind: DomainKind,
    sampler: PairSampler,
    full_product: bool,
}

/// A subset of `X x X` with membership, structured sampling, and perturbation.
#[derive(Clone)]
pub struct FiberedDomain {
    inner: Arc<DomainInner>,
}

impl fmt::Debug for FiberedDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiberedDomain({})", self.inner.label)
    }
}

impl FiberedDomain {
    /// Fibered product of `f` and `g`, which must share source and target.
    pub fn fibered(
        label: impl Into<String>,
        f: MapSpec,
        g: MapSpec,
        fiber_tol: f64,
        sampler: PairSampler,
    ) -> Result<FiberedDomain> {
        if !f.source().same_as(g.source()) {
            return Err(Error::SpaceMismatch {
                expected: f.source().id().to_string(),
                actual: g.source().id().to_string(),
            });
        }
        if !f.target().same_as(g.target()) {
            return Err(Error::SpaceMismatch {
                expected: f.target().id().to_string(),
                actual: g.target().id().to_string(),
            });
        }
        let space = f.source().clone();
        Ok(FiberedDomain {
            inner: Arc::new(DomainInner {
                label: label.into(),
                space,
                kind: DomainKind::Fibered { f, g, fiber_tol },
                sampler,
                full_product: false,
            }),
        })
    }

    /// All of `X x X`, realized as the fibered product of two copies of the
    /// constant map at the basepoint.
    pub fn full_product(space: &Space) -> FiberedDomain {
        let base = space.basepoint();
        let c = MapSpec::constant_into(space, space, base);
        FiberedDomain {
            inner: Arc::new(DomainInner {
                label: format!("{}x{}", space.id(), space.id()),
                space: space.clone(),
                kind: DomainKind::Fibered {
                    f: c.clone(),
                    g: c,
                    fiber_tol: FIBER_TOL,
                },
                sampler: PairSampler::FullProduct,
                full_product: true,
            }),
        }
    }

    /// Free-form subset of `X x X` given by a membership predicate.
    pub fn custom(
        label: impl Into<String>,
        space: &Space,
        membership: impl Fn(&Point, &Point) -> bool + Send + Sync + 'static,
        sampler: PairSampler,
    ) -> FiberedDomain {
        FiberedDomain {
            inner: Arc::new(DomainInner {
                label: label.into(),
                space: space.clone(),
                kind: DomainKind::Custom {
                    membership: Arc::new(membership),
                },
                sampler,
                full_product: false,
            }),
        }
    }

    pub(crate) fn from_parts(
        label: String,
        space: Space,
        f: MapSpec,
        g: MapSpec,
        fiber_tol: f64,
        sampler: PairSampler,
        full_product: bool,
    ) -> FiberedDomain {
        FiberedDomain {
            inner: Arc::new(DomainInner {
                label,
                space,
                kind: DomainKind::Fibered { f, g, fiber_tol },
                sampler,
                full_product,
            }),
        }
    }

    pub(crate) fn custom_from_parts(
        label: String,
        space: Space,
        membership: PairPredicate,
        sampler: PairSampler,
        full_product: bool,
    ) -> FiberedDomain {
        FiberedDomain {
            inner: Arc::new(DomainInner {
                label,
                space,
                kind: DomainKind::Custom { membership },
                sampler,
                full_product,
            }),
        }
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// The common source space `X`.
    pub fn space(&self) -> &Space {
        &self.inner.space
    }

    pub fn sampler(&self) -> &PairSampler {
        &self.inner.sampler
    }

    /// Whether this domain is all of `X x X`.
    pub fn is_full_product(&self) -> bool {
        self.inner.full_product
    }

    /// The defining maps `(f, g, fiber_tol)` when this is a fibered product.
    pub fn fibered_maps(&self) -> Option<(&MapSpec, &MapSpec, f64)> {
        match &self.inner.kind {
            DomainKind::Fibered { f, g, fiber_tol } => Some((f, g, *fiber_tol)),
            DomainKind::Custom { .. } => None,
        }
    }

    /// `d_Z(f(x), g(y))` for fibered domains; `None` for custom domains.
    pub fn fiber_deviation(&self, x: &Point, y: &Point) -> Option<f64> {
        match &self.inner.kind {
            DomainKind::Fibered { f, g, .. } => {
                let fx = f.apply_raw(x);
                let gy = g.apply_raw(y);
                Some(f.target().dist_coords(fx.coords(), gy.coords()))
            }
            DomainKind::Custom { .. } => None,
        }
    }

    /// Membership test; both coordinates must also lie on the space.
    pub fn contains(&self, x: &Point, y: &Point) -> bool {
        if !self.inner.space.contains(x) || !self.inner.space.contains(y) {
            return false;
        }
        match &self.inner.kind {
            DomainKind::Fibered { fiber_tol, .. } => {
                self.fiber_deviation(x, y).unwrap_or(f64::MAX) <= *fiber_tol
            }
            DomainKind::Custom { membership } => membership(x, y),
        }
    }

    /// Error unless `(x, y)` is a member.
    pub fn check_member(&self, x: &Point, y: &Point) -> Result<()> {
        self.inner.space.check_point(x)?;
        self.inner.space.check_point(y)?;
        if self.contains(x, y) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                x: x.coords().to_vec(),
                y: y.coords().to_vec(),
            })
        }
    }

    /// Draw `n` members deterministically from `seed`.  The first `m` draws
    /// for the same seed are a prefix of the first `n >= m` draws.
    pub fn sample_pairs(&self, n: usize, seed: u64) -> Result<Vec<(Point, Point)>> {
        let mut rng = seeded_rng(seed);
        (0..n).map(|i| self.sample_pair_at(i, &mut rng)).collect()
    }

    fn sample_pair_at(&self, index: usize, rng: &mut ChaCha8Rng) -> Result<(Point, Point)> {
        sample_from(&self.inner.sampler, self, index, rng)
    }

    /// Move a member a distance of at most `delta` (in the product metric)
    /// while staying inside the domain, using the sampler's parametrization.
    /// Returns `None` when no in-domain partner was found.
    pub fn perturb_member(
        &self,
        pair: &(Point, Point),
        delta: f64,
        rng: &mut ChaCha8Rng,
    ) -> Option<(Point, Point)> {
        perturb_from(&self.inner.sampler, self, pair, delta, rng)
    }
}

fn sample_from(
    sampler: &PairSampler,
    dom: &FiberedDomain,
    index: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Point, Point)> {
    let space = dom.space();
    match sampler {
        PairSampler::FullProduct => Ok((space.sample(rng), space.sample(rng))),
        PairSampler::Diagonal => {
            let x = space.sample(rng);
            Ok((x.clone(), x))
        }
        PairSampler::Graph { map, .. } => {
            let x = space.sample(rng);
            let y = map(&x);
            Ok((x, y))
        }
        PairSampler::BaseSlice { base } => Ok((base.clone(), space.sample(rng))),
        PairSampler::Union(components) => {
            let k = components.len();
            if k == 0 {
                return Err(Error::Config("empty sampler union".into()));
            }
            sample_from(&components[index % k], dom, index / k, rng)
        }
        PairSampler::ProductOf { left, right } => {
            let (xl, yl) = left.sample_pair_at(index, rng)?;
            let (xr, yr) = right.sample_pair_at(index, rng)?;
            Ok((join_points(space, &xl, &xr), join_points(space, &yl, &yr)))
        }
        PairSampler::Pushforward { inner, fwd, .. } => {
            let (x, y) = inner.sample_pair_at(index, rng)?;
            Ok((fwd.apply_raw(&x), fwd.apply_raw(&y)))
        }
        PairSampler::Rejection { budget } => {
            for _ in 0..*budget {
                let x = space.sample(rng);
                let y = space.sample(rng);
                if dom.contains(&x, &y) {
                    return Ok((x, y));
                }
            }
            Err(Error::SamplingExhausted {
                domain: dom.label().to_string(),
                budget: *budget,
            })
        }
    }
}

fn perturb_from(
    sampler: &PairSampler,
    dom: &FiberedDomain,
    pair: &(Point, Point),
    delta: f64,
    rng: &mut ChaCha8Rng,
) -> Option<(Point, Point)> {
    let space = dom.space();
    let half = delta / std::f64::consts::SQRT_2;
    match sampler {
        PairSampler::FullProduct => {
            let x = space.point_unchecked(space.tangent_step(pair.0.coords(), half, rng));
            let y = space.point_unchecked(space.tangent_step(pair.1.coords(), half, rng));
            Some((x, y))
        }
        PairSampler::Diagonal => {
            let x = space.point_unchecked(space.tangent_step(pair.0.coords(), half, rng));
            Some((x.clone(), x))
        }
        PairSampler::Graph { map, .. } => {
            let x = space.point_unchecked(space.tangent_step(pair.0.coords(), half, rng));
            let y = map(&x);
            Some((x, y))
        }
        PairSampler::BaseSlice { base } => {
            let y = space.point_unchecked(space.tangent_step(pair.1.coords(), delta, rng));
            Some((base.clone(), y))
        }
        PairSampler::Union(components) => {
            let chosen = components.iter().min_by(|a, b| {
                let sa = component_score(a, dom, pair);
                let sb = component_score(b, dom, pair);
                sa.partial_cmp(&sb).unwrap_or(std::cmp::Ordering::Equal)
            })?;
            perturb_from(chosen, dom, pair, delta, rng)
        }
        PairSampler::ProductOf { left, right } => {
            let dl = left.space().ambient_dim();
            let lp = (
                left.space().point_unchecked(pair.0.coords()[..dl].to_vec()),
                left.space().point_unchecked(pair.1.coords()[..dl].to_vec()),
            );
            let rp = (
                right
                    .space()
                    .point_unchecked(pair.0.coords()[dl..].to_vec()),
                right
                    .space()
                    .point_unchecked(pair.1.coords()[dl..].to_vec()),
            );
            let (xl, yl) = left.perturb_member(&lp, half, rng)?;
            let (xr, yr) = right.perturb_member(&rp, half, rng)?;
            Some((join_points(space, &xl, &xr), join_points(space, &yl, &yr)))
        }
        PairSampler::Pushforward { inner, fwd, inv } => {
            let back = (inv.apply_raw(&pair.0), inv.apply_raw(&pair.1));
            let (x, y) = inner.perturb_member(&back, delta, rng)?;
            Some((fwd.apply_raw(&x), fwd.apply_raw(&y)))
        }
        PairSampler::Rejection { .. } => {
            for _ in 0..8 {
                let x = space.point_unchecked(space.tangent_step(pair.0.coords(), half, rng));
                let y = space.point_unchecked(space.tangent_step(pair.1.coords(), half, rng));
                if dom.contains(&x, &y) {
                    return Some((x, y));
                }
            }
            None
        }
    }
}

/// Distance-like score of how well a union component explains a member.
fn component_score(sampler: &PairSampler, dom: &FiberedDomain, pair: &(Point, Point)) -> f64 {
    let space = dom.space();
    match sampler {
        PairSampler::Diagonal => space.dist_coords(pair.0.coords(), pair.1.coords()),
        PairSampler::Graph { map, .. } => {
            let image = map(&pair.0);
            space.dist_coords(pair.1.coords(), image.coords())
        }
        PairSampler::BaseSlice { base } => space.dist_coords(pair.0.coords(), base.coords()),
        PairSampler::FullProduct | PairSampler::Rejection { .. } => 0.0,
        _ => f64::INFINITY,
    }
}

pub(crate) fn join_points(product: &Space, left: &Point, right: &Point) -> Point {
    let mut coords = Vec::with_capacity(left.coords().len() + right.coords().len());
    coords.extend_from_slice(left.coords());
    coords.extend_from_slice(right.coords());
    product.point_unchecked(coords)
}

/// Sampler-level helper shared by several constructors: the graph of the
/// antipodal map on a sphere.
pub fn antipodal_graph_sampler(space: &Space) -> PairSampler {
    let s = space.clone();
    PairSampler::Graph {
        label: "antipodal".into(),
        map: Arc::new(move |p: &Point| s.point_unchecked(p.coords().iter().map(|v| -v).collect())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_domain(space: &Space) -> FiberedDomain {
        let id = MapSpec::identity(space);
        FiberedDomain::fibered("diag", id.clone(), id, FIBER_TOL, PairSampler::Diagonal).unwrap()
    }

    #[test]
    fn diagonal_sampler_emits_equal_pairs() {
        let s1 = Space::circle();
        let dom = diag_domain(&s1);
        let pairs = dom.sample_pairs(4, 9).unwrap();
        assert_eq!(pairs.len(), 4);
        for (x, y) in &pairs {
            assert_eq!(x.coords(), y.coords());
            assert!(dom.contains(x, y));
        }
    }

    #[test]
    fn sampling_is_deterministic_and_prefix_stable() {
        let s2 = Space::sphere(2);
        let dom = FiberedDomain::full_product(&s2);
        let a = dom.sample_pairs(64, 42).unwrap();
        let b = dom.sample_pairs(64, 42).unwrap();
        let prefix = dom.sample_pairs(16, 42).unwrap();
        for i in 0..64 {
            assert_eq!(a[i].0.coords(), b[i].0.coords());
            assert_eq!(a[i].1.coords(), b[i].1.coords());
        }
        for i in 0..16 {
            assert_eq!(a[i].0.coords(), prefix[i].0.coords());
        }
    }

    #[test]
    fn union_draws_proportionally() {
        let s2 = Space::sphere(2);
        let proj = MapSpec::quotient_projection(&s2, &Space::real_projective(2)).unwrap();
        let dom = FiberedDomain::fibered(
            "antipodal(S2)",
            proj.clone(),
            proj,
            FIBER_TOL,
            PairSampler::Union(vec![PairSampler::Diagonal, antipodal_graph_sampler(&s2)]),
        )
        .unwrap();
        let pairs = dom.sample_pairs(10, 1).unwrap();
        let diagonal_count = pairs
            .iter()
            .filter(|(x, y)| s2.dist_coords(x.coords(), y.coords()) < 1.0)
            .count();
        assert_eq!(diagonal_count, 5);
        for (x, y) in &pairs {
            assert!(dom.contains(x, y), "sampler output must be a member");
        }
    }

    #[test]
    fn rejection_budget_exhausts_on_empty_domain() {
        let s1 = Space::circle();
        let dom = FiberedDomain::custom(
            "empty",
            &s1,
            |_, _| false,
            PairSampler::Rejection { budget: 50 },
        );
        match dom.sample_pairs(1, 0) {
            Err(Error::SamplingExhausted { budget, .. }) => assert_eq!(budget, 50),
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn perturbation_stays_in_domain_and_close() {
        let s2 = Space::sphere(2);
        let proj = MapSpec::quotient_projection(&s2, &Space::real_projective(2)).unwrap();
        let dom = FiberedDomain::fibered(
            "antipodal(S2)",
            proj.clone(),
            proj,
            FIBER_TOL,
            PairSampler::Union(vec![PairSampler::Diagonal, antipodal_graph_sampler(&s2)]),
        )
        .unwrap();
        let pairs = dom.sample_pairs(50, 8).unwrap();
        let mut rng = seeded_rng(77);
        for pair in &pairs {
            let (px, py) = dom.perturb_member(pair, 1e-3, &mut rng).unwrap();
            assert!(dom.contains(&px, &py));
            let d = (s2.dist_coords(pair.0.coords(), px.coords()).powi(2)
                + s2.dist_coords(pair.1.coords(), py.coords()).powi(2))
            .sqrt();
            assert!(d <= 1e-3 + 1e-9);
        }
    }

    #[test]
    fn fibered_membership_detects_near_and_far_pairs() {
        let s2 = Space::sphere(2);
        let proj = MapSpec::quotient_projection(&s2, &Space::real_projective(2)).unwrap();
        let dom = FiberedDomain::fibered(
            "antipodal(S2)",
            proj.clone(),
            proj,
            FIBER_TOL,
            PairSampler::Union(vec![PairSampler::Diagonal, antipodal_graph_sampler(&s2)]),
        )
        .unwrap();
        let x = s2.point(vec![0.0, 0.0, 1.0]).unwrap();
        let minus_x = s2.point(vec![0.0, 0.0, -1.0]).unwrap();
        let far = s2.point(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(dom.contains(&x, &x));
        assert!(dom.contains(&x, &minus_x));
        assert!(!dom.contains(&x, &far));
    }
}
