//! Conversions between planners over a base slice `{x0} x X` and
//! Lusternik-Schnirelmann-style contraction covers.
//!
//! A [`CatWitness`] is a finite cover of `X` by sets that each deform into
//! the base point; its entry count is an upper-bound witness for the category
//! of `X` (counted from 1, so a contractible space has category 1).  A
//! planner whose domain fixes the first coordinate at `x0` carries exactly
//! the same data: sections `s(x0, y)` are contractions run backwards.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{FiberedDomain, MapSpec, PairSampler, Point, Space};
use crate::paths::{concat_halves, ParamPath, PathMode};
use crate::planner::{Piece, Planner, PlannerMode, Provenance};

/// Samples used to decide which cover sets are worth keeping.
const PROBE_SAMPLES: usize = 512;
const PROBE_SEED: u64 = 307;

type CoverPredicate = Arc<dyn Fn(&Point) -> bool + Send + Sync>;
type Contraction = Arc<dyn Fn(&Point, f64) -> Point + Send + Sync>;

/// One cover set together with a contraction `h(y, .)` from the base point
/// to `y`: `h(y, 0) = x0` and `h(y, 1) = y` for every `y` in the set.
#[derive(Clone)]
pub struct CatEntry {
    label: String,
    cover: CoverPredicate,
    contraction: Contraction,
}

impl CatEntry {
    pub fn new(
        label: impl Into<String>,
        cover: impl Fn(&Point) -> bool + Send + Sync + 'static,
        contraction: impl Fn(&Point, f64) -> Point + Send + Sync + 'static,
    ) -> CatEntry {
        CatEntry {
            label: label.into(),
            cover: Arc::new(cover),
            contraction: Arc::new(contraction),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn covers(&self, y: &Point) -> bool {
        (self.cover)(y)
    }

    /// Evaluate the contraction at `(y, t)`.
    pub fn eval(&self, y: &Point, t: f64) -> Point {
        (self.contraction)(y, t)
    }

    pub(crate) fn cover_fn(&self) -> CoverPredicate {
        Arc::clone(&self.cover)
    }

    pub(crate) fn contraction_fn(&self) -> Contraction {
        Arc::clone(&self.contraction)
    }
}

/// A category upper-bound witness: cover sets of `X` with contractions to a
/// common base point.
#[derive(Clone)]
pub struct CatWitness {
    space: Space,
    base: Point,
    entries: Vec<CatEntry>,
}

impl CatWitness {
    pub fn new(space: &Space, base: Point, entries: Vec<CatEntry>) -> Result<CatWitness> {
        space.check_point(&base)?;
        if entries.is_empty() {
            return Err(Error::Config(
                "a cat witness needs at least one entry".into(),
            ));
        }
        Ok(CatWitness {
            space: space.clone(),
            base,
            entries,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn entries(&self) -> &[CatEntry] {
        &self.entries
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    /// Index of the first entry covering `y`.
    pub fn entry_index_of(&self, y: &Point) -> Result<usize> {
        self.entries
            .iter()
            .position(|e| e.covers(y))
            .ok_or_else(|| Error::CoverDomainGap {
                x: self.base.coords().to_vec(),
                y: y.coords().to_vec(),
            })
    }
}

/// The base-slice domain `{x0} x X`, realized as the fibered product of the
/// identity and the constant map at `x0`.
pub fn base_slice_domain(space: &Space, base: &Point) -> Result<FiberedDomain> {
    FiberedDomain::fibered(
        format!("{{x0}}x{}", space.id()),
        MapSpec::identity(space),
        MapSpec::constant(space, base.clone())?,
        crate::geometry::FIBER_TOL,
        PairSampler::BaseSlice { base: base.clone() },
    )
}

/// Read a category witness off a planner whose second fibered map is
/// constant.
///
/// Entry `i` covers `V_i = { y : (x0, y) in piece_i }` and contracts it via
/// `h_i(y, t) = s_i(x0, y)(t)`; entries whose cover set no probe sample hits
/// are dropped, so the entry count never exceeds the piece count.
pub fn planner_to_cat_cover(pl: &Planner) -> Result<CatWitness> {
    pl.require_path_mode("cat-cover")?;
    let Some((f, g, fiber_tol)) = pl.domain().fibered_maps() else {
        return Err(Error::Precondition(
            "cat covers need a fibered domain with a constant second map".into(),
        ));
    };
    let Some(base) = g.constant_base().cloned() else {
        return Err(Error::Precondition(format!(
            "cat covers need a constant second map, got `{}`",
            g.label()
        )));
    };
    let space = pl.space().clone();
    let dev = space.dist_coords(f.apply_raw(&base).coords(), base.coords());
    if dev > fiber_tol {
        return Err(Error::Precondition(format!(
            "base point must satisfy f(x0) = x0; deviation {dev:.3e}"
        )));
    }

    let mut entries = Vec::new();
    for piece in pl.pieces() {
        let mem = piece.membership();
        let b = base.clone();
        let cover: CoverPredicate = Arc::new(move |y: &Point| mem(&b, y));
        let hit = (0..PROBE_SAMPLES).any(|i| cover(&space.sample_at(PROBE_SEED, i)));
        if !hit {
            continue;
        }
        let section = piece.section_fn();
        let (b, fallback) = (base.clone(), base.clone());
        let cov = Arc::clone(&cover);
        let contraction: Contraction = Arc::new(move |y: &Point, t: f64| {
            if !cov(y) {
                return fallback.clone();
            }
            match section(&b, y) {
                Ok(path) => path.at(t),
                Err(_) => fallback.clone(),
            }
        });
        entries.push(CatEntry {
            label: piece.label().to_string(),
            cover,
            contraction,
        });
    }
    CatWitness::new(&space, base, entries)
}

/// Build the base-slice planner of a category witness: piece `i` is
/// `{x0} x V_i` (with earlier entries taking priority on overlaps) and the
/// section at `(x0, y)` replays the contraction `h_i(y, .)`.
pub fn cat_cover_to_planner(w: &CatWitness) -> Result<Planner> {
    let space = w.space().clone();
    let domain = base_slice_domain(&space, w.base())?;
    let pieces = disjoint_cover_pieces(w, |entry, space| {
        let h = entry.contraction_fn();
        let s = space.clone();
        Arc::new(move |x: &Point, y: &Point| {
            let (h2, y2) = (Arc::clone(&h), y.clone());
            ParamPath::new(&s, x.clone(), y.clone(), PathMode::Path, move |t| {
                h2(&y2, t)
            })
        })
    });
    Planner::new(domain, pieces, PlannerMode::Path, Provenance::Converted)
}

/// Build the based-loop planner of a category witness: the section at
/// `(x0, y)` runs the contraction out to `y` and back, a loop pinned at the
/// base point that passes through `y` at `t = 1/2`.
pub fn based_loop_planner_from_cat(w: &CatWitness) -> Result<Planner> {
    let space = w.space().clone();
    let domain = base_slice_domain(&space, w.base())?;
    let pieces = disjoint_cover_pieces(w, |entry, space| {
        let h = entry.contraction_fn();
        let s = space.clone();
        Arc::new(move |x: &Point, y: &Point| {
            let (h2, y2) = (Arc::clone(&h), y.clone());
            let out = ParamPath::new(&s, x.clone(), y.clone(), PathMode::Path, move |t| {
                h2(&y2, t)
            })?;
            concat_halves(&out, &out.reverse())?.with_mode(PathMode::BasedLoop)
        })
    });
    Planner::new(
        domain,
        pieces,
        PlannerMode::BasedLoop {
            base: w.base().clone(),
        },
        Provenance::Converted,
    )
}

/// Pieces `{x0} x V_i`, disjointified by input order, with sections supplied
/// per entry.  Every entry yields a piece, so counts match exactly.
fn disjoint_cover_pieces(
    w: &CatWitness,
    section_of: impl Fn(&CatEntry, &Space) -> crate::planner::SectionFn,
) -> Vec<Piece> {
    let space = w.space();
    let mut pieces = Vec::with_capacity(w.entry_count());
    for (i, entry) in w.entries().iter().enumerate() {
        let own = entry.cover_fn();
        let earlier: Vec<CoverPredicate> = w.entries()[..i].iter().map(|e| e.cover_fn()).collect();
        let membership =
            Arc::new(move |_x: &Point, y: &Point| own(y) && !earlier.iter().any(|c| c(y)));
        pieces.push(Piece::from_parts(
            entry.label().to_string(),
            membership,
            vec![crate::planner::Subpart::new(
                "all",
                |_: &Point, _: &Point| true,
            )],
            section_of(entry, space),
        ));
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::circle_planner;

    fn restricted_circle() -> Planner {
        let pl = circle_planner().unwrap();
        let s1 = Space::circle();
        let dom = base_slice_domain(&s1, &s1.basepoint()).unwrap();
        pl.restrict(dom).unwrap()
    }

    #[test]
    fn circle_cover_has_two_entries_with_exact_base() {
        let w = planner_to_cat_cover(&restricted_circle()).unwrap();
        assert_eq!(w.entry_count(), 2);
        let s1 = Space::circle();
        for i in 0..200 {
            let y = s1.sample_at(5, i);
            let idx = w.entry_index_of(&y).unwrap();
            let h0 = w.entries()[idx].eval(&y, 0.0);
            let h1 = w.entries()[idx].eval(&y, 1.0);
            assert!(s1.dist_coords(h0.coords(), w.base().coords()) < 1e-9);
            assert!(s1.dist_coords(h1.coords(), y.coords()) < 1e-9);
        }
    }

    #[test]
    fn cover_requires_constant_second_map() {
        let pl = circle_planner().unwrap();
        // Full-product domains use constant maps on both sides, so the
        // construction applies; but a genuinely non-constant g must fail.
        assert!(planner_to_cat_cover(&pl).is_ok());
        let s1 = Space::circle();
        let id = MapSpec::identity(&s1);
        let diag = FiberedDomain::fibered(
            "diag",
            id.clone(),
            id,
            crate::geometry::FIBER_TOL,
            PairSampler::Diagonal,
        )
        .unwrap();
        let restricted = circle_planner().unwrap().restrict(diag).unwrap();
        assert!(matches!(
            planner_to_cat_cover(&restricted),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn round_trip_preserves_counts() {
        let pl = restricted_circle();
        let w = planner_to_cat_cover(&pl).unwrap();
        let back = cat_cover_to_planner(&w).unwrap();
        assert_eq!(back.piece_count(), pl.piece_count());
        let w2 = planner_to_cat_cover(&back).unwrap();
        assert_eq!(w2.entry_count(), w.entry_count());
    }

    #[test]
    fn rebuilt_planner_replays_contractions() {
        let w = planner_to_cat_cover(&restricted_circle()).unwrap();
        let pl = cat_cover_to_planner(&w).unwrap();
        let s1 = Space::circle();
        let x0 = s1.basepoint();
        let y = s1.point(vec![0.0, 1.0]).unwrap();
        let (path, _, _) = pl.evaluate(&x0, &y).unwrap();
        assert!(s1.dist_coords(path.eval(0.0).unwrap().coords(), x0.coords()) < 1e-12);
        assert!(s1.dist_coords(path.eval(1.0).unwrap().coords(), y.coords()) < 1e-12);
        // The shorter-arc contraction reaches (0,1) through the first quadrant.
        let mid = path.eval(0.5).unwrap();
        assert!(mid.coords()[0] > 0.0 && mid.coords()[1] > 0.0);
    }

    #[test]
    fn based_loops_pin_the_base_and_hit_y_at_half() {
        let w = planner_to_cat_cover(&restricted_circle()).unwrap();
        let pl = based_loop_planner_from_cat(&w).unwrap();
        assert_eq!(pl.piece_count(), 2);
        assert!(matches!(pl.mode(), PlannerMode::BasedLoop { .. }));
        let s1 = Space::circle();
        let x0 = s1.basepoint();
        for i in 0..100 {
            let y = s1.sample_at(11, i);
            let (path, _, _) = pl.evaluate(&x0, &y).unwrap();
            assert!(s1.dist_coords(path.eval(0.0).unwrap().coords(), x0.coords()) < 1e-9);
            assert!(s1.dist_coords(path.eval(0.5).unwrap().coords(), y.coords()) < 1e-9);
            assert!(s1.dist_coords(path.eval(1.0).unwrap().coords(), x0.coords()) < 1e-9);
        }
    }

    #[test]
    fn contractible_interval_yields_single_entry() {
        let i = Space::unit_interval();
        let pl = {
            let dom = base_slice_domain(&i, &i.basepoint()).unwrap();
            let s = i.clone();
            let piece = Piece::new(
                "slide",
                |_: &Point, _: &Point| true,
                move |x: &Point, y: &Point| {
                    let (a, b) = (x.coords()[0], y.coords()[0]);
                    let s2 = s.clone();
                    ParamPath::new(&s, x.clone(), y.clone(), PathMode::Path, move |t| {
                        s2.point_unchecked(vec![(1.0 - t) * a + t * b])
                    })
                },
            );
            Planner::new(
                dom,
                vec![piece],
                PlannerMode::Path,
                Provenance::Builtin("slide"),
            )
            .unwrap()
        };
        let w = planner_to_cat_cover(&pl).unwrap();
        assert_eq!(w.entry_count(), 1);
        let back = cat_cover_to_planner(&w).unwrap();
        assert_eq!(back.piece_count(), 1);
    }
}
