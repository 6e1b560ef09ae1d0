//! Deliberately broken planners, used as negative controls for the
//! verification checks.  Each corruption is tuned to fail exactly one check.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FiberedDomain, Point, Space};
use crate::paths::geodesic;
use crate::planner::{Piece, Planner, PlannerMode, Provenance};

/// Ways to break a valid planner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    /// Drop the last piece, leaving part of the domain uncovered.
    Gap,
    /// Duplicate the first piece, so its members match two pieces.
    Overlap,
    /// Stop every section at two thirds of its way, breaking the `t = 1`
    /// endpoint contract.
    BrokenEndpoint,
    /// Rotate loop outputs by `0.01 * sin^2(pi t)` in the leading coordinate
    /// plane: endpoints stay fixed while the loop misses `y` at `t = 1/2` by
    /// exactly 0.01.
    PerturbedMidpoint,
}

impl Corruption {
    pub fn name(self) -> &'static str {
        match self {
            Corruption::Gap => "gap",
            Corruption::Overlap => "overlap",
            Corruption::BrokenEndpoint => "broken-endpoint",
            Corruption::PerturbedMidpoint => "perturbed-midpoint",
        }
    }
}

/// Apply a corruption to a planner, keeping everything else intact.
pub fn corrupt_planner(pl: &Planner, corruption: Corruption) -> Result<Planner> {
    let pieces: Vec<Piece> = match corruption {
        Corruption::Gap => {
            if pl.piece_count() < 2 {
                return Err(Error::Precondition(
                    "gap corruption needs at least two pieces to drop one".into(),
                ));
            }
            pl.pieces()[..pl.piece_count() - 1].to_vec()
        }
        Corruption::Overlap => {
            let mut pieces = pl.pieces().to_vec();
            pieces.push(pl.pieces()[0].clone());
            pieces
        }
        Corruption::BrokenEndpoint => pl
            .pieces()
            .iter()
            .map(|piece| {
                let section = piece.section_fn();
                Piece::from_parts(
                    piece.label().to_string(),
                    piece.membership(),
                    piece.subparts().to_vec(),
                    Arc::new(move |x: &Point, y: &Point| {
                        Ok(section(x, y)?.time_scaled_unchecked(2.0 / 3.0))
                    }),
                )
            })
            .collect(),
        Corruption::PerturbedMidpoint => {
            if !pl.mode().is_loop() {
                return Err(Error::ModeMismatch {
                    expected: "loop (midpoint corruption)".into(),
                    actual: pl.mode().name().to_string(),
                });
            }
            if pl.space().ambient_dim() < 2 {
                return Err(Error::Precondition(
                    "midpoint corruption rotates the leading coordinate plane".into(),
                ));
            }
            let space = pl.space().clone();
            pl.pieces()
                .iter()
                .map(|piece| {
                    let section = piece.section_fn();
                    let s = space.clone();
                    Piece::from_parts(
                        piece.label().to_string(),
                        piece.membership(),
                        piece.subparts().to_vec(),
                        Arc::new(move |x: &Point, y: &Point| {
                            let s2 = s.clone();
                            Ok(section(x, y)?.warped_unchecked(move |p, t| {
                                let a = 0.01 * (std::f64::consts::PI * t).sin().powi(2);
                                let (sn, co) = a.sin_cos();
                                let mut c = p.coords().to_vec();
                                let (c0, c1) = (c[0], c[1]);
                                c[0] = c0 * co - c1 * sn;
                                c[1] = c0 * sn + c1 * co;
                                s2.point_unchecked(c)
                            }))
                        }),
                    )
                })
                .collect()
        }
    };
    Planner::new(
        pl.domain().clone(),
        pieces,
        pl.mode().clone(),
        pl.provenance().clone(),
    )
}

/// A one-piece planner on all of `S^1 x S^1` whose section always takes the
/// un-hinted shortest arc.  The arc choice flips orientation across the
/// antipodal seam, so the continuity check must fail there; everything else
/// about the planner is sound.
pub fn seam_discontinuity_planner() -> Result<Planner> {
    let s1 = Space::circle();
    let domain = FiberedDomain::full_product(&s1);
    let s = s1.clone();
    let piece = Piece::new(
        "shortest-arc-everywhere",
        |_: &Point, _: &Point| true,
        move |x: &Point, y: &Point| geodesic(&s, x, y, None),
    );
    Planner::new(
        domain,
        vec![piece],
        PlannerMode::Path,
        Provenance::Builtin("seam-discontinuity"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::circle_planner;

    fn s1_pt(x: f64, y: f64) -> Point {
        Space::circle().point(vec![x, y]).unwrap()
    }

    #[test]
    fn gap_drops_the_antipodal_band() {
        let pl = corrupt_planner(&circle_planner().unwrap(), Corruption::Gap).unwrap();
        assert_eq!(pl.piece_count(), 1);
        let x = s1_pt(1.0, 0.0);
        let y = s1_pt(-1.0, 0.0);
        assert!(matches!(
            pl.piece_index_of(&x, &y),
            Err(Error::CoverageGap { .. })
        ));
    }

    #[test]
    fn overlap_makes_the_first_piece_ambiguous() {
        let pl = corrupt_planner(&circle_planner().unwrap(), Corruption::Overlap).unwrap();
        assert_eq!(pl.piece_count(), 3);
        let x = s1_pt(1.0, 0.0);
        let y = s1_pt(0.0, 1.0);
        assert!(matches!(
            pl.piece_index_of(&x, &y),
            Err(Error::PartitionViolation { count: 2, .. })
        ));
    }

    #[test]
    fn broken_endpoint_stops_short_of_y() {
        let pl = corrupt_planner(&circle_planner().unwrap(), Corruption::BrokenEndpoint).unwrap();
        let x = s1_pt(1.0, 0.0);
        let y = s1_pt(0.0, 1.0);
        let (path, _, _) = pl.evaluate(&x, &y).unwrap();
        let end = path.eval(1.0).unwrap();
        let dev = Space::circle().dist_coords(end.coords(), y.coords());
        assert!((dev - std::f64::consts::FRAC_PI_2 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn perturbed_midpoint_misses_y_by_one_percent() {
        let looped = circle_planner().unwrap().to_loop().unwrap();
        let pl = corrupt_planner(&looped, Corruption::PerturbedMidpoint).unwrap();
        let x = s1_pt(1.0, 0.0);
        let y = s1_pt(0.0, 1.0);
        let (path, _, _) = pl.evaluate(&x, &y).unwrap();
        let mid = path.eval(0.5).unwrap();
        let dev = Space::circle().dist_coords(mid.coords(), y.coords());
        assert!((dev - 0.01).abs() < 1e-9, "dev = {dev}");
        // Endpoints stay exact: sin^2 vanishes at t = 0 and t = 1.
        let dev0 = Space::circle().dist_coords(path.eval(0.0).unwrap().coords(), x.coords());
        assert!(dev0 < 1e-12);
    }

    #[test]
    fn midpoint_corruption_requires_loop_mode() {
        let pl = circle_planner().unwrap();
        assert!(matches!(
            corrupt_planner(&pl, Corruption::PerturbedMidpoint),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn seam_planner_flips_orientation_across_the_seam() {
        let pl = seam_discontinuity_planner().unwrap();
        let x = s1_pt(1.0, 0.0);
        // Two targets just shy of the antipode of x, one on each side.
        let ang = std::f64::consts::PI - 1e-3;
        let above = s1_pt(ang.cos(), ang.sin());
        let below = s1_pt(ang.cos(), -ang.sin());
        let (pa, _, _) = pl.evaluate(&x, &above).unwrap();
        let (pb, _, _) = pl.evaluate(&x, &below).unwrap();
        let ma = pa.eval(0.5).unwrap();
        let mb = pb.eval(0.5).unwrap();
        let gap = Space::circle().dist_coords(ma.coords(), mb.coords());
        assert!(
            gap > 3.0,
            "midpoints land on opposite half-circles, gap = {gap}"
        );
    }

    #[test]
    fn corruption_names_round_trip_through_serde() {
        for c in [
            Corruption::Gap,
            Corruption::Overlap,
            Corruption::BrokenEndpoint,
            Corruption::PerturbedMidpoint,
        ] {
            let json = serde_json::to_string(&c).unwrap();
            assert_eq!(json, format!("\"{}\"", c.name()));
            let back: Corruption = serde_json::from_str(&json).unwrap();
            assert_eq!(back, c);
        }
    }
}
