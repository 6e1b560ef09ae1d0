//! Model spaces: spheres, intervals, finite products, and finite quotients.
//!
//! Every space carries an ambient chart (`R^ambient_dim`), an intrinsic
//! metric, a membership test, and a seeded uniform sampler.  Quotient spaces
//! are represented by points of their total space together with a finite list
//! of chart-level orbit transformations; their metric is the orbit minimum
//! `d([p],[q]) = min_g d(p, g.q)` and each orbit has a canonical
//! representative used by [`Space::quotient_project`].

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Default tolerance for "lies on the space" checks.
pub const EPS_SPACE: f64 = 1e-9;

/// Coordinates below this magnitude are treated as zero when scanning for the
/// first significant coordinate of a projective representative.
pub const SIGN_SCAN_TOL: f64 = 1e-9;

/// A point of a [`Space`], stored in the space's ambient chart.
#[derive(Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
    space: Arc<str>,
}

impl Point {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn space_id(&self) -> &str {
        &self.space
    }

    pub(crate) fn from_parts(coords: Vec<f64>, space: Arc<str>) -> Point {
        Point { coords, space }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.space, self.coords)
    }
}

/// Shared coordinate transformation, the payload of an [`OrbitMap`].
type CoordMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A chart-level transformation belonging to a finite orbit group.
#[derive(Clone)]
pub struct OrbitMap {
    label: String,
    apply: CoordMap,
}

impl OrbitMap {
    pub fn new(
        label: impl Into<String>,
        apply: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> OrbitMap {
        OrbitMap {
            label: label.into(),
            apply: Arc::new(apply),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, coords: &[f64]) -> Vec<f64> {
        (self.apply)(coords)
    }
}

/// Rule selecting the canonical representative of a finite orbit.
#[derive(Clone, Debug)]
pub enum CanonicalRule {
    /// Pick the orbit element whose first coordinate above [`SIGN_SCAN_TOL`]
    /// (scanning from index 0) is positive.  Used by projective spaces.
    FirstSignificantPositive,
    /// Pick the orbit element whose angle `atan2(c[i+1], c[i])` lies in
    /// `[0, pi)`.  Used by the Klein bottle, where `i` addresses the second
    /// circle factor.
    HalfOpenAngle { coord: usize },
}

enum SpaceKind {
    /// Unit sphere `S^dim` embedded in `R^{dim+1}`.
    Sphere { dim: usize },
    /// Closed interval `[lo, hi]` in `R`.
    Interval { lo: f64, hi: f64 },
    /// Finite product with the flat `l2` combination of factor metrics.
    Product { factors: Vec<Space> },
    /// Finite quotient of `total` by the listed orbit (which includes the
    /// identity), with an explicit canonical-representative rule.
    Quotient {
        total: Space,
        orbit: Vec<OrbitMap>,
        canon: CanonicalRule,
    },
}

struct SpaceInner {
    id: Arc<str>,
    kind: SpaceKind,
}

/// A model space; cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Space {
    inner: Arc<SpaceInner>,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({})", self.inner.id)
    }
}

impl Space {
    fn new(id: impl Into<String>, kind: SpaceKind) -> Space {
        Space {
            inner: Arc::new(SpaceInner {
                id: Arc::from(id.into()),
                kind,
            }),
        }
    }

    /// Unit circle `S^1` in `R^2`.
    pub fn circle() -> Space {
        Space::new("S1", SpaceKind::Sphere { dim: 1 })
    }

    /// Unit sphere `S^n` in `R^{n+1}`.
    pub fn sphere(dim: usize) -> Space {
        Space::new(format!("S{dim}"), SpaceKind::Sphere { dim })
    }

    /// Closed unit interval `[0, 1]`.
    pub fn unit_interval() -> Space {
        Space::new("I", SpaceKind::Interval { lo: 0.0, hi: 1.0 })
    }

    /// Flat torus `T^2 = S^1 x S^1`.
    pub fn torus2() -> Space {
        Space::new(
            "T2",
            SpaceKind::Product {
                factors: vec![Space::circle(), Space::circle()],
            },
        )
    }

    /// Cylinder `S^1 x [0, 1]`.
    pub fn cylinder() -> Space {
        Space::new(
            "CYL",
            SpaceKind::Product {
                factors: vec![Space::circle(), Space::unit_interval()],
            },
        )
    }

    /// Finite product with an explicit identifier.
    pub fn product(id: impl Into<String>, factors: Vec<Space>) -> Space {
        Space::new(id, SpaceKind::Product { factors })
    }

    /// Real projective space `RP^n` as the antipodal quotient of `S^n`.
    pub fn real_projective(dim: usize) -> Space {
        let total = Space::sphere(dim);
        let id = OrbitMap::new("id", |c: &[f64]| c.to_vec());
        let neg = OrbitMap::new("antipodal", |c: &[f64]| c.iter().map(|v| -v).collect());
        Space::new(
            format!("RP{dim}"),
            SpaceKind::Quotient {
                total,
                orbit: vec![id, neg],
                canon: CanonicalRule::FirstSignificantPositive,
            },
        )
    }

    /// Klein bottle as the quotient of `T^2` by `(z, w) -> (conj z, -w)`.
    pub fn klein() -> Space {
        let total = Space::torus2();
        let id = OrbitMap::new("id", |c: &[f64]| c.to_vec());
        let invol = OrbitMap::new("flip", |c: &[f64]| vec![c[0], -c[1], -c[2], -c[3]]);
        Space::new(
            "K",
            SpaceKind::Quotient {
                total,
                orbit: vec![id, invol],
                canon: CanonicalRule::HalfOpenAngle { coord: 2 },
            },
        )
    }

    /// Look up one of the named model spaces.
    pub fn by_name(name: &str) -> Result<Space> {
        match name {
            "S1" => Ok(Space::circle()),
            "S2" => Ok(Space::sphere(2)),
            "S3" => Ok(Space::sphere(3)),
            "I" => Ok(Space::unit_interval()),
            "T2" => Ok(Space::torus2()),
            "CYL" => Ok(Space::cylinder()),
            "RP1" => Ok(Space::real_projective(1)),
            "RP2" => Ok(Space::real_projective(2)),
            "RP3" => Ok(Space::real_projective(3)),
            "K" => Ok(Space::klein()),
            other => Err(Error::Config(format!("unknown space `{other}`"))),
        }
    }

    pub fn id(&self) -> &str {
        &self.inner.id
    }

    pub(crate) fn id_arc(&self) -> Arc<str> {
        Arc::clone(&self.inner.id)
    }

    /// Two handles denote the same space when their identifiers agree.
    pub fn same_as(&self, other: &Space) -> bool {
        self.inner.id == other.inner.id
    }

    /// Dimension of the ambient chart.
    pub fn ambient_dim(&self) -> usize {
        match &self.inner.kind {
            SpaceKind::Sphere { dim } => dim + 1,
            SpaceKind::Interval { .. } => 1,
            SpaceKind::Product { factors } => factors.iter().map(Space::ambient_dim).sum(),
            SpaceKind::Quotient { total, .. } => total.ambient_dim(),
        }
    }

    /// Product factors, if this space is a product.
    pub fn factors(&self) -> Option<&[Space]> {
        match &self.inner.kind {
            SpaceKind::Product { factors } => Some(factors),
            _ => None,
        }
    }

    /// Total space, if this space is a quotient.
    pub fn quotient_total(&self) -> Option<&Space> {
        match &self.inner.kind {
            SpaceKind::Quotient { total, .. } => Some(total),
            _ => None,
        }
    }

    /// Orbit transformations, if this space is a quotient.
    pub fn orbit(&self) -> Option<&[OrbitMap]> {
        match &self.inner.kind {
            SpaceKind::Quotient { orbit, .. } => Some(orbit),
            _ => None,
        }
    }

    /// How far `coords` are from satisfying the membership constraints.
    pub fn membership_violation(&self, coords: &[f64]) -> f64 {
        if coords.len() != self.ambient_dim() {
            return f64::MAX;
        }
        match &self.inner.kind {
            SpaceKind::Sphere { .. } => {
                let norm = coords.iter().map(|v| v * v).sum::<f64>().sqrt();
                (norm - 1.0).abs()
            }
            SpaceKind::Interval { lo, hi } => {
                let x = coords[0];
                (lo - x).max(x - hi).max(0.0)
            }
            SpaceKind::Product { factors } => {
                let mut worst = 0.0_f64;
                let mut off = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    worst = worst.max(f.membership_violation(&coords[off..off + d]));
                    off += d;
                }
                worst
            }
            SpaceKind::Quotient { total, .. } => total.membership_violation(coords),
        }
    }

    /// Validate coordinates and wrap them into a [`Point`].
    pub fn point(&self, coords: Vec<f64>) -> Result<Point> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                space: self.id().to_string(),
                expected: self.ambient_dim(),
                actual: coords.len(),
            });
        }
        let violation = self.membership_violation(&coords);
        if violation > EPS_SPACE {
            return Err(Error::OutsideSpace {
                space: self.id().to_string(),
                coords,
                violation,
            });
        }
        Ok(Point::from_parts(coords, self.id_arc()))
    }

    /// Wrap coordinates produced by an exact construction without revalidating.
    pub(crate) fn point_unchecked(&self, coords: Vec<f64>) -> Point {
        Point::from_parts(coords, self.id_arc())
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.space_id() == self.id() && self.membership_violation(p.coords()) <= EPS_SPACE
    }

    /// Error unless `p` is a point of this space.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.space_id() != self.id() {
            return Err(Error::SpaceMismatch {
                expected: self.id().to_string(),
                actual: p.space_id().to_string(),
            });
        }
        let violation = self.membership_violation(p.coords());
        if violation > EPS_SPACE {
            return Err(Error::OutsideSpace {
                space: self.id().to_string(),
                coords: p.coords().to_vec(),
                violation,
            });
        }
        Ok(())
    }

    /// Intrinsic distance between raw coordinate vectors (no checks).
    pub(crate) fn dist_coords(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.inner.kind {
            SpaceKind::Sphere { .. } => {
                // Chord-based angle: stable at both ends of the range, unlike
                // acos of the dot product whose error near +/-1 is ~sqrt(eps).
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                if dot >= 0.0 {
                    let chord: f64 = a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                        .sqrt();
                    2.0 * (chord / 2.0).min(1.0).asin()
                } else {
                    let anti: f64 = a
                        .iter()
                        .zip(b)
                        .map(|(x, y)| (x + y) * (x + y))
                        .sum::<f64>()
                        .sqrt();
                    PI - 2.0 * (anti / 2.0).min(1.0).asin()
                }
            }
            SpaceKind::Interval { .. } => (a[0] - b[0]).abs(),
            SpaceKind::Product { factors } => {
                let mut sum = 0.0;
                let mut off = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    let fd = f.dist_coords(&a[off..off + d], &b[off..off + d]);
                    sum += fd * fd;
                    off += d;
                }
                sum.sqrt()
            }
            SpaceKind::Quotient { total, orbit, .. } => {
                let mut best = f64::INFINITY;
                for g in orbit {
                    let gb = g.apply(b);
                    let d = total.dist_coords(a, &gb);
                    if d < best {
                        best = d;
                    }
                }
                best
            }
        }
    }

    /// Intrinsic distance; errors if either point fails membership.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.dist_coords(p.coords(), q.coords()))
    }

    /// Nearest-point re-projection of raw coordinates onto the space.
    pub(crate) fn project_coords(&self, coords: &[f64]) -> Vec<f64> {
        match &self.inner.kind {
            SpaceKind::Sphere { .. } => {
                let norm = coords.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm == 0.0 {
                    let mut out = vec![0.0; coords.len()];
                    out[0] = 1.0;
                    out
                } else {
                    coords.iter().map(|v| v / norm).collect()
                }
            }
            SpaceKind::Interval { lo, hi } => vec![coords[0].clamp(*lo, *hi)],
            SpaceKind::Product { factors } => {
                let mut out = Vec::with_capacity(coords.len());
                let mut off = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    out.extend(f.project_coords(&coords[off..off + d]));
                    off += d;
                }
                out
            }
            SpaceKind::Quotient { total, .. } => total.project_coords(coords),
        }
    }

    /// Canonical orbit representative of raw coordinates (quotients only;
    /// other spaces return the input).
    pub(crate) fn canonicalize(&self, coords: &[f64]) -> Vec<f64> {
        match &self.inner.kind {
            SpaceKind::Quotient { orbit, canon, .. } => match canon {
                CanonicalRule::FirstSignificantPositive => {
                    let flip = coords
                        .iter()
                        .find(|c| c.abs() > SIGN_SCAN_TOL)
                        .map(|c| *c < 0.0)
                        .unwrap_or(false);
                    if flip {
                        orbit
                            .iter()
                            .find(|g| g.label() != "id")
                            .map(|g| g.apply(coords))
                            .unwrap_or_else(|| coords.to_vec())
                    } else {
                        coords.to_vec()
                    }
                }
                CanonicalRule::HalfOpenAngle { coord } => {
                    let in_range = |c: &[f64]| {
                        let theta = c[coord + 1].atan2(c[*coord]);
                        (0.0..std::f64::consts::PI).contains(&theta)
                    };
                    if in_range(coords) {
                        return coords.to_vec();
                    }
                    for g in orbit {
                        let gc = g.apply(coords);
                        if in_range(&gc) {
                            return gc;
                        }
                    }
                    coords.to_vec()
                }
            },
            _ => coords.to_vec(),
        }
    }

    /// Project a total-space point to its canonical representative on this
    /// quotient.  Errors when this space is not a quotient of `p`'s space.
    pub fn quotient_project(&self, p: &Point) -> Result<Point> {
        let total = match self.quotient_total() {
            Some(t) => t,
            None => {
                return Err(Error::NotAQuotient {
                    total: p.space_id().to_string(),
                    claimed: self.id().to_string(),
                })
            }
        };
        if p.space_id() != total.id() && p.space_id() != self.id() {
            return Err(Error::NotAQuotient {
                total: p.space_id().to_string(),
                claimed: self.id().to_string(),
            });
        }
        total.check_coords(p.coords())?;
        Ok(self.point_unchecked(self.canonicalize(p.coords())))
    }

    fn check_coords(&self, coords: &[f64]) -> Result<()> {
        let violation = self.membership_violation(coords);
        if violation > EPS_SPACE {
            return Err(Error::OutsideSpace {
                space: self.id().to_string(),
                coords: coords.to_vec(),
                violation,
            });
        }
        Ok(())
    }

    /// Canonical basepoint: first standard basis vector on spheres, the lower
    /// bound on intervals, factor basepoints on products.
    pub fn basepoint(&self) -> Point {
        self.point_unchecked(self.basepoint_coords())
    }

    fn basepoint_coords(&self) -> Vec<f64> {
        match &self.inner.kind {
            SpaceKind::Sphere { dim } => {
                let mut c = vec![0.0; dim + 1];
                c[0] = 1.0;
                c
            }
            SpaceKind::Interval { lo, .. } => vec![*lo],
            SpaceKind::Product { factors } => {
                let mut out = Vec::with_capacity(self.ambient_dim());
                for f in factors {
                    out.extend(f.basepoint_coords());
                }
                out
            }
            SpaceKind::Quotient { total, .. } => self.canonicalize(&total.basepoint_coords()),
        }
    }

    /// Draw one approximately uniform point.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        self.point_unchecked(self.sample_coords(rng))
    }

    /// Draw the `index`-th point of a seeded stream.  Each index gets an
    /// independent generator, so callers may visit indices in any order or
    /// from parallel workers and still see identical points.
    pub fn sample_at(&self, seed: u64, index: usize) -> Point {
        let mut rng = seeded_rng(derive_seed(seed, SAMPLE_STREAM_TAG, index as u64));
        self.sample(&mut rng)
    }

    fn sample_coords(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match &self.inner.kind {
            SpaceKind::Sphere { dim } => loop {
                let v: Vec<f64> = (0..dim + 1).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-6 {
                    return v.into_iter().map(|x| x / norm).collect();
                }
            },
            SpaceKind::Interval { lo, hi } => vec![rng.gen_range(*lo..=*hi)],
            SpaceKind::Product { factors } => {
                let mut out = Vec::with_capacity(self.ambient_dim());
                for f in factors {
                    out.extend(f.sample_coords(rng));
                }
                out
            }
            SpaceKind::Quotient { total, .. } => {
                let raw = total.sample_coords(rng);
                self.canonicalize(&raw)
            }
        }
    }

    /// Move `coords` by an intrinsic step of at most `step`, staying on the
    /// space.  The direction is drawn from `rng`.
    pub(crate) fn tangent_step(&self, coords: &[f64], step: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match &self.inner.kind {
            SpaceKind::Sphere { dim } => {
                for _ in 0..16 {
                    let raw: Vec<f64> = (0..dim + 1).map(|_| rng.sample(StandardNormal)).collect();
                    let dot: f64 = raw.iter().zip(coords).map(|(r, c)| r * c).sum();
                    let tang: Vec<f64> = raw.iter().zip(coords).map(|(r, c)| r - dot * c).collect();
                    let norm = tang.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 1e-9 {
                        let (c, s) = (step.cos(), step.sin());
                        return coords
                            .iter()
                            .zip(&tang)
                            .map(|(x, t)| c * x + s * t / norm)
                            .collect();
                    }
                }
                coords.to_vec()
            }
            SpaceKind::Interval { lo, hi } => {
                let dir = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                vec![(coords[0] + dir * step).clamp(*lo, *hi)]
            }
            SpaceKind::Product { factors } => {
                let share = step / (factors.len() as f64).sqrt();
                let mut out = Vec::with_capacity(coords.len());
                let mut off = 0;
                for f in factors {
                    let d = f.ambient_dim();
                    out.extend(f.tangent_step(&coords[off..off + d], share, rng));
                    off += d;
                }
                out
            }
            SpaceKind::Quotient { total, .. } => total.tangent_step(coords, step, rng),
        }
    }
}

/// Stream tag separating [`Space::sample_at`] draws from other derived
/// streams built on [`derive_seed`].
const SAMPLE_STREAM_TAG: u64 = 0xA5;

/// Deterministic generator for seeded sampling.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream for (`seed`, `tag`, `index`) so that
/// per-member randomness does not depend on how members are chunked.
pub fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    let mut z =
        seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;
    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn sphere_distance_matches_arc_length() {
        let s1 = Space::circle();
        let p = s1.point(vec![1.0, 0.0]).unwrap();
        let q = s1.point(vec![0.0, 1.0]).unwrap();
        let r = s1.point(vec![-1.0, 0.0]).unwrap();
        assert!((s1.distance(&p, &q).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert!((s1.distance(&p, &r).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn projective_line_identifies_antipodes() {
        let rp1 = Space::real_projective(1);
        let p = rp1.point(vec![1.0, 0.0]).unwrap();
        let q = rp1.point(vec![-1.0, 0.0]).unwrap();
        assert!(rp1.distance(&p, &q).unwrap().abs() < 1e-12);
    }

    #[test]
    fn klein_identifies_involution_orbit() {
        let k = Space::klein();
        let t2 = Space::torus2();
        let (a, b) = (0.7_f64, 1.3_f64);
        let p = t2.point(vec![a.cos(), a.sin(), b.cos(), b.sin()]).unwrap();
        let q = t2
            .point(vec![a.cos(), -a.sin(), -b.cos(), -b.sin()])
            .unwrap();
        let pp = k.quotient_project(&p).unwrap();
        let qq = k.quotient_project(&q).unwrap();
        assert!(k.distance(&pp, &qq).unwrap().abs() < 1e-12);
    }

    #[test]
    fn quotient_projection_is_idempotent() {
        let rp2 = Space::real_projective(2);
        let mut rng = seeded_rng(11);
        for _ in 0..200 {
            let p = rp2.sample(&mut rng);
            let once = rp2.quotient_project(&p).unwrap();
            let twice = rp2.quotient_project(&once).unwrap();
            assert_eq!(once.coords(), twice.coords());
        }
        let k = Space::klein();
        for _ in 0..200 {
            let p = k.sample(&mut rng);
            let once = k.quotient_project(&p).unwrap();
            let twice = k.quotient_project(&once).unwrap();
            assert_eq!(once.coords(), twice.coords());
        }
    }

    #[test]
    fn quotient_project_rejects_mismatched_pairing() {
        let s2 = Space::sphere(2);
        let rp3 = Space::real_projective(3);
        let p = s2.point(vec![0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            rp3.quotient_project(&p),
            Err(Error::NotAQuotient { .. })
        ));
        let s1 = Space::circle();
        let q = s1.point(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            s1.clone().quotient_project(&q),
            Err(Error::NotAQuotient { .. })
        ));
    }

    #[test]
    fn membership_rejects_off_space_points() {
        let s2 = Space::sphere(2);
        let err = s2.point(vec![1.0, 1.0, 0.0]).unwrap_err();
        match err {
            Error::OutsideSpace { violation, .. } => assert!(violation > 0.4),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn cylinder_combines_factor_metrics() {
        let cyl = Space::cylinder();
        let p = cyl.point(vec![1.0, 0.0, 0.0]).unwrap();
        let q = cyl.point(vec![1.0, 0.0, 1.0]).unwrap();
        assert!((cyl.distance(&p, &q).unwrap() - 1.0).abs() < 1e-12);
        let r = cyl.point(vec![0.0, 1.0, 1.0]).unwrap();
        let expected = (FRAC_PI_2 * FRAC_PI_2 + 1.0_f64).sqrt();
        assert!((cyl.distance(&p, &r).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn orbit_invariance_of_quotient_metric() {
        let rp2 = Space::real_projective(2);
        let mut rng = seeded_rng(3);
        for _ in 0..500 {
            let p = rp2.sample(&mut rng);
            let q = rp2.sample(&mut rng);
            let d = rp2.dist_coords(p.coords(), q.coords());
            for g in rp2.orbit().unwrap() {
                let gq = g.apply(q.coords());
                let dg = rp2.dist_coords(p.coords(), &gq);
                assert!(
                    (d - dg).abs() <= 1e-12,
                    "orbit invariance broke: {d} vs {dg}"
                );
            }
        }
    }

    #[test]
    fn tangent_step_stays_on_space_and_moves_at_most_step() {
        let spaces = [
            Space::circle(),
            Space::sphere(2),
            Space::torus2(),
            Space::cylinder(),
        ];
        let mut rng = seeded_rng(5);
        for space in &spaces {
            for _ in 0..100 {
                let p = space.sample(&mut rng);
                let moved = space.tangent_step(p.coords(), 1e-3, &mut rng);
                assert!(space.membership_violation(&moved) <= 1e-9);
                let d = space.dist_coords(p.coords(), &moved);
                assert!(
                    d <= 1e-3 + 1e-12,
                    "step {d} exceeded budget on {}",
                    space.id()
                );
            }
        }
    }
}
