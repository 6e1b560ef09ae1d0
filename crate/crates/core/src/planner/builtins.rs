//! Ready-made planners on model spaces.

use crate::error::{Error, Result};
use crate::geometry::{
    antipodal_graph_sampler, FiberedDomain, MapSpec, PairSampler, Point, Space, FIBER_TOL,
    REJECTION_BUDGET,
};
use crate::paths::{geodesic, ParamPath, PathMode};
use crate::planner::{Piece, Planner, PlannerMode, Provenance, Subpart};

/// Half-width of the antipodal band served by the long-way piece of the
/// circle planner.  The shorter-arc rule is only continuous away from the
/// antipodal seam, so the seam keeps a band of this radius around it.
pub const CIRCLE_SEAM_HALF_WIDTH: f64 = 0.2;

/// `|x . e|` threshold splitting the antipodal part of the even sphere
/// planner into an equatorial band piece and a polar cap piece.
pub const SPHERE_EVEN_CAP_THRESHOLD: f64 = 0.5;

/// Signed angle from `x` to `y` on the unit circle, in `(-pi, pi]`.
pub(crate) fn signed_angle(x: &[f64], y: &[f64]) -> f64 {
    let cross = x[0] * y[1] - x[1] * y[0];
    let dot = x[0] * y[0] + x[1] * y[1];
    cross.atan2(dot)
}

/// Counterclockwise angle from `x` to `y`, in `[0, 2*pi)`.
pub(crate) fn ccw_angle(x: &[f64], y: &[f64]) -> f64 {
    let a = signed_angle(x, y);
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

fn rotate(c: &[f64], alpha: f64) -> Vec<f64> {
    let (s, co) = alpha.sin_cos();
    vec![c[0] * co - c[1] * s, c[0] * s + c[1] * co]
}

/// Arc-length gap between `y` and the antipode of `x` on the circle.
fn antipodal_gap(x: &[f64], y: &[f64]) -> f64 {
    std::f64::consts::PI - signed_angle(x, y).abs()
}

/// Constant-speed rotation of `x` by the angle `alpha`, declared to end at `y`.
fn rotation_path(space: &Space, x: &Point, y: &Point, alpha: f64) -> Result<ParamPath> {
    let s = space.clone();
    let xc = x.coords().to_vec();
    ParamPath::new(space, x.clone(), y.clone(), PathMode::Path, move |t| {
        s.point_unchecked(rotate(&xc, t * alpha))
    })
}

/// Two-piece planner for all of `S^1 x S^1`.
///
/// The shorter-arc piece serves every pair whose second point stays at least
/// [`CIRCLE_SEAM_HALF_WIDTH`] away from the antipode of the first (constant
/// path when `y = x`); inside that band the second piece goes the long way
/// around counterclockwise, which degenerates to the counterclockwise
/// half-turn at exactly antipodal pairs.
pub fn circle_planner() -> Result<Planner> {
    let s1 = Space::circle();
    let domain = FiberedDomain::full_product(&s1);

    let near = {
        let s = s1.clone();
        Piece::new(
            "shorter-arc",
            |x: &Point, y: &Point| antipodal_gap(x.coords(), y.coords()) > CIRCLE_SEAM_HALF_WIDTH,
            move |x: &Point, y: &Point| {
                rotation_path(&s, x, y, signed_angle(x.coords(), y.coords()))
            },
        )
    };
    let band = {
        let s = s1.clone();
        Piece::new(
            "antipodal-band",
            |x: &Point, y: &Point| antipodal_gap(x.coords(), y.coords()) <= CIRCLE_SEAM_HALF_WIDTH,
            move |x: &Point, y: &Point| rotation_path(&s, x, y, ccw_angle(x.coords(), y.coords())),
        )
    };

    Planner::new(
        domain,
        vec![near, band],
        PlannerMode::Path,
        Provenance::Builtin("circle"),
    )
}

/// One-piece shorter-arc planner on the part of `S^1 x S^1` that avoids the
/// antipodal band.  Together with [`circle_off_diagonal_planner`] it covers
/// the full product.
pub fn circle_off_antipodal_planner() -> Result<Planner> {
    let s1 = Space::circle();
    let domain = FiberedDomain::custom(
        "off-antipodal",
        &s1,
        |x: &Point, y: &Point| antipodal_gap(x.coords(), y.coords()) > CIRCLE_SEAM_HALF_WIDTH,
        PairSampler::Rejection {
            budget: REJECTION_BUDGET,
        },
    );
    let s = s1.clone();
    let piece = Piece::new(
        "shorter-arc",
        |x: &Point, y: &Point| antipodal_gap(x.coords(), y.coords()) > CIRCLE_SEAM_HALF_WIDTH,
        move |x: &Point, y: &Point| rotation_path(&s, x, y, signed_angle(x.coords(), y.coords())),
    );
    Planner::new(
        domain,
        vec![piece],
        PlannerMode::Path,
        Provenance::Builtin("circle-off-antipodal"),
    )
}

/// One-piece counterclockwise planner on the part of `S^1 x S^1` that avoids
/// a band around the diagonal.
pub fn circle_off_diagonal_planner() -> Result<Planner> {
    let s1 = Space::circle();
    let domain = FiberedDomain::custom(
        "off-diagonal",
        &s1,
        |x: &Point, y: &Point| {
            Space::circle().dist_coords(x.coords(), y.coords()) > CIRCLE_SEAM_HALF_WIDTH
        },
        PairSampler::Rejection {
            budget: REJECTION_BUDGET,
        },
    );
    let s = s1.clone();
    let piece = Piece::new(
        "counterclockwise",
        |x: &Point, y: &Point| {
            Space::circle().dist_coords(x.coords(), y.coords()) > CIRCLE_SEAM_HALF_WIDTH
        },
        move |x: &Point, y: &Point| rotation_path(&s, x, y, ccw_angle(x.coords(), y.coords())),
    );
    Planner::new(
        domain,
        vec![piece],
        PlannerMode::Path,
        Provenance::Builtin("circle-off-diagonal"),
    )
}

/// One-piece planner on the diagonal of any space: constant paths.
pub fn diagonal_planner(space: &Space) -> Result<Planner> {
    let id = MapSpec::identity(space);
    let domain = FiberedDomain::fibered(
        format!("diagonal({})", space.id()),
        id.clone(),
        id,
        FIBER_TOL,
        PairSampler::Diagonal,
    )?;
    let s = space.clone();
    let piece = Piece::new(
        "diagonal",
        |_: &Point, _: &Point| true,
        move |x: &Point, y: &Point| {
            let xc = x.coords().to_vec();
            let sp = s.clone();
            ParamPath::new(&s, x.clone(), y.clone(), PathMode::Path, move |_t| {
                sp.point_unchecked(xc.clone())
            })
        },
    );
    Planner::new(
        domain,
        vec![piece],
        PlannerMode::Path,
        Provenance::Builtin("diagonal"),
    )
}

/// Unit-speed half great circle from `x` towards the plane direction `v`
/// (not necessarily unit), declared to end at `y`.
fn half_turn_path(space: &Space, x: &Point, y: &Point, v: Vec<f64>) -> Result<ParamPath> {
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm <= 1e-9 {
        return Err(Error::DegenerateHint);
    }
    let axis: Vec<f64> = v.into_iter().map(|a| a / norm).collect();
    let xc = x.coords().to_vec();
    let s = space.clone();
    ParamPath::new(space, x.clone(), y.clone(), PathMode::Path, move |t| {
        let ang = t * std::f64::consts::PI;
        let (sn, co) = ang.sin_cos();
        s.point_unchecked(xc.iter().zip(&axis).map(|(a, u)| co * a + sn * u).collect())
    })
}

fn near_diagonal(space: &Space, x: &Point, y: &Point) -> bool {
    space.dist_coords(x.coords(), y.coords()) <= std::f64::consts::FRAC_PI_2
}

/// Planner for the antipodal fibered domain of `S^n -> RP^n`, which consists
/// of the diagonal and the antidiagonal of `S^n`.
///
/// For odd `n` (here 1 and 3) a single nonvanishing tangent field turns every
/// antipodal pair around, so one piece suffices; its two subparts carry
/// constant paths on the diagonal and tangent-field half-turns on the
/// antidiagonal.  For `n = 2` the antidiagonal splits at
/// [`SPHERE_EVEN_CAP_THRESHOLD`] into an equatorial band piece (field
/// `e - (x.e) x`) and a polar cap piece (field `e' - (x.e') x` for a
/// perpendicular axis `e'`), giving two pieces.
pub fn sphere_antipodal_planner(n: usize) -> Result<Planner> {
    match n {
        1 | 3 => sphere_odd_planner(n),
        2 => sphere_even_planner(),
        other => Err(Error::Unsupported(format!(
            "antipodal planner is provided for spheres of dimension 1, 2, 3; got {other}"
        ))),
    }
}

fn antipodal_domain(n: usize) -> Result<FiberedDomain> {
    let sphere = Space::sphere(n);
    let rp = Space::real_projective(n);
    let proj = MapSpec::quotient_projection(&sphere, &rp)?;
    FiberedDomain::fibered(
        format!("antipodal(S{n})"),
        proj.clone(),
        proj,
        FIBER_TOL,
        PairSampler::Union(vec![
            PairSampler::Diagonal,
            antipodal_graph_sampler(&sphere),
        ]),
    )
}

/// Tangent field without zeros on an odd sphere: rotate consecutive
/// coordinate pairs a quarter turn.
fn odd_tangent_field(x: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; x.len()];
    for i in (0..x.len()).step_by(2) {
        v[i] = -x[i + 1];
        v[i + 1] = x[i];
    }
    v
}

fn sphere_odd_planner(n: usize) -> Result<Planner> {
    let sphere = Space::sphere(n);
    let domain = antipodal_domain(n)?;
    let sp = sphere.clone();
    let diag = {
        let s = sphere.clone();
        Subpart::new("diagonal", move |x: &Point, y: &Point| {
            near_diagonal(&s, x, y)
        })
    };
    let anti = {
        let s = sphere.clone();
        Subpart::new("antidiagonal", move |x: &Point, y: &Point| {
            !near_diagonal(&s, x, y)
        })
    };
    let piece = Piece::with_subparts(
        "turn-field",
        |_: &Point, _: &Point| true,
        vec![diag, anti],
        move |x: &Point, y: &Point| {
            if near_diagonal(&sp, x, y) {
                geodesic(&sp, x, y, None)
            } else {
                half_turn_path(&sp, x, y, odd_tangent_field(x.coords()))
            }
        },
    );
    Planner::new(
        domain,
        vec![piece],
        PlannerMode::Path,
        Provenance::Builtin("sphere-antipodal"),
    )
}

fn sphere_even_planner() -> Result<Planner> {
    let sphere = Space::sphere(2);
    let domain = antipodal_domain(2)?;
    let polar = |x: &Point| x.coords()[2].abs() > SPHERE_EVEN_CAP_THRESHOLD;

    let band = {
        let s = sphere.clone();
        let diag = {
            let s2 = s.clone();
            Subpart::new("diagonal", move |x: &Point, y: &Point| {
                near_diagonal(&s2, x, y)
            })
        };
        let anti = {
            let s2 = s.clone();
            Subpart::new("anti-equatorial", move |x: &Point, y: &Point| {
                !near_diagonal(&s2, x, y)
            })
        };
        let sp = s.clone();
        Piece::with_subparts(
            "equatorial",
            move |x: &Point, y: &Point| near_diagonal(&s, x, y) || !polar(x),
            vec![diag, anti],
            move |x: &Point, y: &Point| {
                if near_diagonal(&sp, x, y) {
                    geodesic(&sp, x, y, None)
                } else {
                    let c = x.coords();
                    // Field e - (x.e) x for the pole axis e = (0, 0, 1).
                    let dot = c[2];
                    let v = vec![-dot * c[0], -dot * c[1], 1.0 - dot * c[2]];
                    half_turn_path(&sp, x, y, v)
                }
            },
        )
    };

    let caps = {
        let s = sphere.clone();
        let sp = s.clone();
        Piece::new(
            "polar-caps",
            move |x: &Point, y: &Point| !near_diagonal(&s, x, y) && polar(x),
            move |x: &Point, y: &Point| {
                let c = x.coords();
                // Field e' - (x.e') x for the equatorial axis e' = (1, 0, 0).
                let dot = c[0];
                let v = vec![1.0 - dot * c[0], -dot * c[1], -dot * c[2]];
                half_turn_path(&sp, x, y, v)
            },
        )
    };

    Planner::new(
        domain,
        vec![band, caps],
        PlannerMode::Path,
        Provenance::Builtin("sphere-antipodal"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1_point(x: f64, y: f64) -> Point {
        Space::circle().point(vec![x, y]).unwrap()
    }

    #[test]
    fn circle_quarter_pair_uses_shorter_arc() {
        let pl = circle_planner().unwrap();
        let x = s1_point(1.0, 0.0);
        let y = s1_point(0.0, 1.0);
        let (path, piece, _) = pl.evaluate(&x, &y).unwrap();
        assert_eq!(pl.pieces()[piece].label(), "shorter-arc");
        let mid = path.eval(0.5).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((mid.coords()[0] - r).abs() < 1e-12);
        assert!((mid.coords()[1] - r).abs() < 1e-12);
    }

    #[test]
    fn circle_antipodal_pair_takes_ccw_half_turn() {
        let pl = circle_planner().unwrap();
        let x = s1_point(1.0, 0.0);
        let y = s1_point(-1.0, 0.0);
        let (path, piece, _) = pl.evaluate(&x, &y).unwrap();
        assert_eq!(pl.pieces()[piece].label(), "antipodal-band");
        let mid = path.eval(0.5).unwrap();
        assert!((mid.coords()[0]).abs() < 1e-12);
        assert!((mid.coords()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_identical_pair_stays_put() {
        let pl = circle_planner().unwrap();
        let x = s1_point(0.6, 0.8);
        let (path, piece, _) = pl.evaluate(&x, &x).unwrap();
        assert_eq!(pl.pieces()[piece].label(), "shorter-arc");
        for k in 0..=8 {
            let p = path.eval(k as f64 / 8.0).unwrap();
            assert!(Space::circle().dist_coords(p.coords(), x.coords()) < 1e-12);
        }
    }

    #[test]
    fn circle_pieces_partition_everything() {
        let pl = circle_planner().unwrap();
        let pairs = pl.domain().sample_pairs(2000, 3).unwrap();
        for (x, y) in &pairs {
            pl.piece_index_of(x, y).unwrap();
        }
    }

    #[test]
    fn odd_sphere_planner_turns_antipodes() {
        for n in [1, 3] {
            let pl = sphere_antipodal_planner(n).unwrap();
            assert_eq!(pl.piece_count(), 1);
            let sphere = Space::sphere(n);
            let x = sphere.basepoint();
            let y = sphere
                .point(x.coords().iter().map(|v| -v).collect())
                .unwrap();
            let (path, _, subpart) = pl.evaluate(&x, &y).unwrap();
            assert_eq!(pl.pieces()[0].subparts()[subpart].label(), "antidiagonal");
            let end = path.eval(1.0).unwrap();
            assert!(sphere.dist_coords(end.coords(), y.coords()) < 1e-9);
            let mid = path.eval(0.5).unwrap();
            assert!(
                (sphere.dist_coords(mid.coords(), x.coords()) - std::f64::consts::FRAC_PI_2).abs()
                    < 1e-9
            );
        }
    }

    #[test]
    fn even_sphere_planner_splits_equator_and_caps() {
        let pl = sphere_antipodal_planner(2).unwrap();
        assert_eq!(pl.piece_count(), 2);
        let s2 = Space::sphere(2);

        // Equatorial antipodal pair: plane spanned by x and the pole axis.
        let x = s2.point(vec![1.0, 0.0, 0.0]).unwrap();
        let y = s2.point(vec![-1.0, 0.0, 0.0]).unwrap();
        let (path, piece, _) = pl.evaluate(&x, &y).unwrap();
        assert_eq!(pl.pieces()[piece].label(), "equatorial");
        let mid = path.eval(0.5).unwrap();
        assert!(
            (mid.coords()[2] - 1.0).abs() < 1e-12,
            "half-turn passes the pole"
        );

        // Polar antipodal pair: handled by the cap piece.
        let np = s2.point(vec![0.0, 0.0, 1.0]).unwrap();
        let sp = s2.point(vec![0.0, 0.0, -1.0]).unwrap();
        let (path, piece, _) = pl.evaluate(&np, &sp).unwrap();
        assert_eq!(pl.pieces()[piece].label(), "polar-caps");
        let mid = path.eval(0.5).unwrap();
        assert!(
            (mid.coords()[0] - 1.0).abs() < 1e-12,
            "cap field points along e'"
        );
    }

    #[test]
    fn sphere_planner_rejects_other_dimensions() {
        assert!(matches!(
            sphere_antipodal_planner(4),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn diagonal_planner_serves_constant_paths() {
        let s2 = Space::sphere(2);
        let pl = diagonal_planner(&s2).unwrap();
        assert_eq!(pl.piece_count(), 1);
        let pairs = pl.domain().sample_pairs(16, 4).unwrap();
        for (x, y) in &pairs {
            let (path, _, _) = pl.evaluate(x, y).unwrap();
            for k in 0..=4 {
                let p = path.eval(k as f64 / 4.0).unwrap();
                assert_eq!(p.coords(), x.coords());
            }
        }
    }

    #[test]
    fn half_domain_planners_cover_their_domains() {
        let near = circle_off_antipodal_planner().unwrap();
        let far = circle_off_diagonal_planner().unwrap();
        for pl in [&near, &far] {
            let pairs = pl.domain().sample_pairs(500, 17).unwrap();
            for (x, y) in &pairs {
                let (path, _, _) = pl.evaluate(x, y).unwrap();
                let end = path.eval(1.0).unwrap();
                assert!(Space::circle().dist_coords(end.coords(), y.coords()) < 1e-9);
            }
        }
    }
}
