//! Planner transforms: restriction, transport, domination, loop conversion,
//! products, and cover combination.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::domain::join_points;
use crate::geometry::{FiberedDomain, MapSpec, PairSampler, Point, Space, REJECTION_BUDGET};
use crate::paths::{concat_halves, concat_thirds, ParamPath, PathMode};
use crate::planner::{
    HomotopySpec, PairPredicate, Piece, Planner, PlannerMode, Provenance, Subpart,
};

/// Sample count used when probing which pieces survive a construction.
const PROBE_SAMPLES: usize = 512;
/// Fixed seed for construction-time probes, so the same inputs always
/// produce the same planner.
const PROBE_SEED: u64 = 101;
/// Sample count for construction-time sanity checks of maps and homotopies.
const CHECK_SAMPLES: usize = 256;
const CHECK_SEED: u64 = 211;
/// Tolerance for those checks.
const CHECK_EPS: f64 = 1e-9;

/// The pair space `X x X` hosting homotopies between self-maps of pairs.
pub fn pair_space(space: &Space) -> Space {
    Space::product(
        format!("{}x{}", space.id(), space.id()),
        vec![space.clone(), space.clone()],
    )
}

/// Split a point of a two-factor product space into its factor points.
fn split_point(product: &Space, p: &Point) -> Result<(Point, Point)> {
    let factors = product
        .factors()
        .ok_or_else(|| Error::Precondition(format!("{} is not a product space", product.id())))?;
    if factors.len() != 2 {
        return Err(Error::Precondition(format!(
            "expected a two-factor product, got {} factors",
            factors.len()
        )));
    }
    let k = factors[0].ambient_dim();
    let c = p.coords();
    Ok((
        factors[0].point_unchecked(c[..k].to_vec()),
        factors[1].point_unchecked(c[k..].to_vec()),
    ))
}

impl Planner {
    /// Restrict to a smaller domain on the same space.
    ///
    /// Pieces keep their sections; memberships are intersected with the new
    /// domain, and pieces that no probe sample hits are dropped, so the count
    /// never grows.
    pub fn restrict(&self, dom: FiberedDomain) -> Result<Planner> {
        if !dom.space().same_as(self.space()) {
            return Err(Error::SpaceMismatch {
                expected: self.space().id().to_string(),
                actual: dom.space().id().to_string(),
            });
        }
        let probes = dom.sample_pairs(PROBE_SAMPLES, PROBE_SEED)?;
        let mut hit = vec![false; self.piece_count()];
        for (x, y) in &probes {
            self.domain().check_member(x, y)?;
            hit[self.piece_index_of(x, y)?] = true;
        }
        let mut pieces = Vec::new();
        for (piece, _) in self.pieces().iter().zip(&hit).filter(|(_, h)| **h) {
            let mem = piece.membership();
            let d = dom.clone();
            pieces.push(Piece::from_parts(
                piece.label().to_string(),
                Arc::new(move |x: &Point, y: &Point| d.contains(x, y) && mem(x, y)),
                piece.subparts().to_vec(),
                piece.section_fn(),
            ));
        }
        self.with_parts(dom, pieces, self.mode().clone(), Provenance::Restricted)
    }

    /// Conjugate by a space isomorphism `phi: X -> X'` with explicit inverse.
    ///
    /// Memberships are pulled back through the inverse and sections become
    /// `t -> phi(s(phi^-1 x', phi^-1 y')(t))`; the piece count is unchanged.
    pub fn transport_bundle_iso(&self, phi: &MapSpec, phi_inv: &MapSpec) -> Result<Planner> {
        if !phi.source().same_as(self.space()) {
            return Err(Error::SpaceMismatch {
                expected: self.space().id().to_string(),
                actual: phi.source().id().to_string(),
            });
        }
        if !phi_inv.source().same_as(phi.target()) || !phi_inv.target().same_as(phi.source()) {
            return Err(Error::SpaceMismatch {
                expected: format!("{} -> {}", phi.target().id(), phi.source().id()),
                actual: format!("{} -> {}", phi_inv.source().id(), phi_inv.target().id()),
            });
        }
        let target = phi.target().clone();
        for i in 0..CHECK_SAMPLES {
            let x = self.space().sample_at(CHECK_SEED, i);
            let dev = self
                .space()
                .dist_coords(phi_inv.apply_raw(&phi.apply_raw(&x)).coords(), x.coords());
            if dev > CHECK_EPS {
                return Err(Error::NotAnIsomorphism {
                    fwd: phi.label().to_string(),
                    inv: phi_inv.label().to_string(),
                    dev,
                });
            }
            let xp = target.sample_at(CHECK_SEED, i);
            let dev =
                target.dist_coords(phi.apply_raw(&phi_inv.apply_raw(&xp)).coords(), xp.coords());
            if dev > CHECK_EPS {
                return Err(Error::NotAnIsomorphism {
                    fwd: phi_inv.label().to_string(),
                    inv: phi.label().to_string(),
                    dev,
                });
            }
        }

        let domain = pushforward_domain(self.domain(), phi, phi_inv)?;
        let path_mode = self.mode().path_mode();
        let mut pieces = Vec::with_capacity(self.piece_count());
        for piece in self.pieces() {
            let mem = piece.membership();
            let inv_m = phi_inv.clone();
            let membership =
                Arc::new(move |x: &Point, y: &Point| mem(&inv_m.apply_raw(x), &inv_m.apply_raw(y)));
            let subparts = piece
                .subparts()
                .iter()
                .map(|sp| {
                    let m = sp.membership();
                    let inv_s = phi_inv.clone();
                    Subpart::from_parts(
                        sp.label().to_string(),
                        Arc::new(move |x: &Point, y: &Point| {
                            m(&inv_s.apply_raw(x), &inv_s.apply_raw(y))
                        }),
                    )
                })
                .collect();
            let section = piece.section_fn();
            let fwd = phi.clone();
            let inv = phi_inv.clone();
            let tgt = target.clone();
            pieces.push(Piece::from_parts(
                piece.label().to_string(),
                membership,
                subparts,
                Arc::new(move |x: &Point, y: &Point| {
                    let inner = section(&inv.apply_raw(x), &inv.apply_raw(y))?;
                    let f = fwd.clone();
                    ParamPath::new(&tgt, x.clone(), y.clone(), path_mode, move |t| {
                        f.apply_raw(&inner.at(t))
                    })
                }),
            ));
        }
        let mode = match self.mode() {
            PlannerMode::BasedLoop { base } => PlannerMode::BasedLoop {
                base: phi.apply(base)?,
            },
            other => other.clone(),
        };
        self.with_parts(domain, pieces, mode, Provenance::Transported)
    }

    /// Carry the planner across a fiberwise homotopy equivalence `v: X' -> X`
    /// with homotopy inverse `u: X -> X'`.
    ///
    /// `h` deforms `u . v` to the identity of `X'`; `h_back` deforms the
    /// identity of `X` to `v . u` and is only validated, since the section
    /// formula needs `h` alone.  Each new section runs `h` backwards from
    /// `x'`, crosses along `u . s(v x', v y')`, and runs `h` forwards into
    /// `y'`, so transported sections hit their endpoints exactly.  Pieces map
    /// one-to-one; the planner's fibered maps `(f, g)` become
    /// `(f . v, g . v)`.
    pub fn transport_fhe(
        &self,
        u: &MapSpec,
        v: &MapSpec,
        h: &HomotopySpec,
        h_back: &HomotopySpec,
    ) -> Result<Planner> {
        self.require_path_mode("transport-fhe")?;
        let x = self.space().clone();
        let xp = v.source().clone();
        if !v.target().same_as(&x) {
            return Err(Error::SpaceMismatch {
                expected: x.id().to_string(),
                actual: v.target().id().to_string(),
            });
        }
        if !u.source().same_as(&x) || !u.target().same_as(&xp) {
            return Err(Error::SpaceMismatch {
                expected: format!("{} -> {}", x.id(), xp.id()),
                actual: format!("{} -> {}", u.source().id(), u.target().id()),
            });
        }
        for i in 0..CHECK_SAMPLES {
            // h: at time 0 the composite u.v, at time 1 the identity of X'.
            let p = xp.sample_at(CHECK_SEED, i);
            let uv = u.apply_raw(&v.apply_raw(&p));
            let dev = xp.dist_coords(h.eval(&p, 0.0).coords(), uv.coords());
            if dev > CHECK_EPS {
                return Err(Error::InvalidHomotopy {
                    label: h.label().to_string(),
                    end: "t=0 (u.v)".into(),
                    dev,
                });
            }
            let dev = xp.dist_coords(h.eval(&p, 1.0).coords(), p.coords());
            if dev > CHECK_EPS {
                return Err(Error::InvalidHomotopy {
                    label: h.label().to_string(),
                    end: "t=1 (identity)".into(),
                    dev,
                });
            }
            // h_back: at time 0 the identity of X, at time 1 the composite v.u.
            let q = x.sample_at(CHECK_SEED.wrapping_add(1), i);
            let dev = x.dist_coords(h_back.eval(&q, 0.0).coords(), q.coords());
            if dev > CHECK_EPS {
                return Err(Error::InvalidHomotopy {
                    label: h_back.label().to_string(),
                    end: "t=0 (identity)".into(),
                    dev,
                });
            }
            let vu = v.apply_raw(&u.apply_raw(&q));
            let dev = x.dist_coords(h_back.eval(&q, 1.0).coords(), vu.coords());
            if dev > CHECK_EPS {
                return Err(Error::InvalidHomotopy {
                    label: h_back.label().to_string(),
                    end: "t=1 (v.u)".into(),
                    dev,
                });
            }
        }

        let domain = pullback_domain(self.domain(), &xp, v)?;
        let mut pieces = Vec::with_capacity(self.piece_count());
        for piece in self.pieces() {
            let mem = piece.membership();
            let v_m = v.clone();
            let membership =
                Arc::new(move |a: &Point, b: &Point| mem(&v_m.apply_raw(a), &v_m.apply_raw(b)));
            let subparts = piece
                .subparts()
                .iter()
                .map(|sp| {
                    let m = sp.membership();
                    let v_s = v.clone();
                    Subpart::from_parts(
                        sp.label().to_string(),
                        Arc::new(move |a: &Point, b: &Point| {
                            m(&v_s.apply_raw(a), &v_s.apply_raw(b))
                        }),
                    )
                })
                .collect();
            let section = piece.section_fn();
            let (uc, vc, hc, sp) = (u.clone(), v.clone(), h.clone(), xp.clone());
            pieces.push(Piece::from_parts(
                piece.label().to_string(),
                membership,
                subparts,
                Arc::new(move |a: &Point, b: &Point| {
                    let inner = section(&vc.apply_raw(a), &vc.apply_raw(b))?;
                    let uva = uc.apply_raw(&vc.apply_raw(a));
                    let uvb = uc.apply_raw(&vc.apply_raw(b));
                    let (h1, p1) = (hc.clone(), a.clone());
                    let leg1 = ParamPath::new(&sp, a.clone(), uva.clone(), PathMode::Path, {
                        move |t| h1.eval(&p1, 1.0 - t)
                    })?;
                    let u2 = uc.clone();
                    let leg2 = ParamPath::new(&sp, uva, uvb.clone(), PathMode::Path, move |t| {
                        u2.apply_raw(&inner.at(t))
                    })?;
                    let (h3, p3) = (hc.clone(), b.clone());
                    let leg3 = ParamPath::new(&sp, uvb, b.clone(), PathMode::Path, {
                        move |t| h3.eval(&p3, t)
                    })?;
                    concat_thirds(&leg1, &leg2, &leg3)
                }),
            ));
        }
        self.with_parts(domain, pieces, PlannerMode::Path, Provenance::Transported)
    }

    /// Extend the planner from its domain `A` to a larger domain whose pairs
    /// deform into `A`.
    ///
    /// `deform` is a homotopy on the pair space with `deform(., 0)` the
    /// inclusion and `deform(., 1)` landing in `A`.  A new section runs the
    /// first components of the deformation forwards, crosses along the inner
    /// section, and runs the second components backwards; the piece count is
    /// unchanged.
    pub fn dominate(&self, target: FiberedDomain, deform: &HomotopySpec) -> Result<Planner> {
        self.require_path_mode("dominate")?;
        let space = self.space().clone();
        if !target.space().same_as(&space) {
            return Err(Error::SpaceMismatch {
                expected: space.id().to_string(),
                actual: target.space().id().to_string(),
            });
        }
        let pairs = pair_space(&space);
        match deform.space().factors() {
            Some([a, b]) if a.same_as(&space) && b.same_as(&space) => {}
            _ => {
                return Err(Error::Precondition(format!(
                    "deformation homotopy must live on {}, got {}",
                    pairs.id(),
                    deform.space().id()
                )))
            }
        }
        let probes = target.sample_pairs(PROBE_SAMPLES, PROBE_SEED)?;
        for (x, y) in &probes {
            let joined = join_points(&pairs, x, y);
            let dev0 = pairs.dist_coords(deform.eval(&joined, 0.0).coords(), joined.coords());
            if dev0 > CHECK_EPS {
                return Err(Error::InvalidHomotopy {
                    label: deform.label().to_string(),
                    end: "t=0 (inclusion)".into(),
                    dev: dev0,
                });
            }
            let (x1, y1) = split_point(&pairs, &deform.eval(&joined, 1.0))?;
            if !self.domain().contains(&x1, &y1) {
                return Err(Error::DominationEscape {
                    x: x.coords().to_vec(),
                    y: y.coords().to_vec(),
                });
            }
        }

        let mut pieces = Vec::with_capacity(self.piece_count());
        for piece in self.pieces() {
            let land = {
                let (d, ps) = (deform.clone(), pairs.clone());
                move |x: &Point, y: &Point| -> Result<(Point, Point)> {
                    split_point(&ps, &d.eval(&join_points(&ps, x, y), 1.0))
                }
            };
            let mem = piece.membership();
            let land_m = land.clone();
            let membership = Arc::new(move |x: &Point, y: &Point| match land_m(x, y) {
                Ok((x1, y1)) => mem(&x1, &y1),
                Err(_) => false,
            });
            let subparts = piece
                .subparts()
                .iter()
                .map(|sp| {
                    let m = sp.membership();
                    let land_s = land.clone();
                    Subpart::from_parts(
                        sp.label().to_string(),
                        Arc::new(move |x: &Point, y: &Point| match land_s(x, y) {
                            Ok((x1, y1)) => m(&x1, &y1),
                            Err(_) => false,
                        }),
                    )
                })
                .collect();
            let section = piece.section_fn();
            let (d, ps, sp) = (deform.clone(), pairs.clone(), space.clone());
            pieces.push(Piece::from_parts(
                piece.label().to_string(),
                membership,
                subparts,
                Arc::new(move |x: &Point, y: &Point| {
                    let joined = join_points(&ps, x, y);
                    let (x1, y1) = split_point(&ps, &d.eval(&joined, 1.0))?;
                    let inner = section(&x1, &y1)?;
                    let (d1, ps1, j1) = (d.clone(), ps.clone(), joined.clone());
                    let leg1 =
                        ParamPath::new(&sp, x.clone(), x1.clone(), PathMode::Path, move |t| {
                            split_point(&ps1, &d1.eval(&j1, t))
                                .expect("pair space split")
                                .0
                        })?;
                    let (d3, ps3) = (d.clone(), ps.clone());
                    let leg3 =
                        ParamPath::new(&sp, y1.clone(), y.clone(), PathMode::Path, move |t| {
                            split_point(&ps3, &d3.eval(&joined, 1.0 - t))
                                .expect("pair space split")
                                .1
                        })?;
                    concat_thirds(&leg1, &inner, &leg3)
                }),
            ));
        }
        self.with_parts(target, pieces, PlannerMode::Path, Provenance::Transported)
    }

    /// Turn each section into the out-and-back free loop
    /// `concat_halves(s, reverse(s))`, which passes through `y` at `t = 1/2`.
    pub fn to_loop(&self) -> Result<Planner> {
        self.require_path_mode("to-loop")?;
        let pieces = self
            .pieces()
            .iter()
            .map(|piece| {
                let section = piece.section_fn();
                Piece::from_parts(
                    piece.label().to_string(),
                    piece.membership(),
                    piece.subparts().to_vec(),
                    Arc::new(move |x: &Point, y: &Point| {
                        let path = section(x, y)?;
                        concat_halves(&path, &path.reverse())?.with_mode(PathMode::FreeLoop)
                    }),
                )
            })
            .collect();
        self.with_parts(
            self.domain().clone(),
            pieces,
            PlannerMode::FreeLoop,
            Provenance::Converted,
        )
    }
}

/// Push a domain forward along a space isomorphism.
fn pushforward_domain(
    domain: &FiberedDomain,
    phi: &MapSpec,
    phi_inv: &MapSpec,
) -> Result<FiberedDomain> {
    let target = phi.target().clone();
    let sampler = PairSampler::Pushforward {
        inner: Box::new(domain.clone()),
        fwd: phi.clone(),
        inv: phi_inv.clone(),
    };
    let label = format!("{}|{}", domain.label(), phi.label());
    if let Some((f, g, tol)) = domain.fibered_maps() {
        Ok(FiberedDomain::from_parts(
            label,
            target,
            MapSpec::compose(f, phi_inv)?,
            MapSpec::compose(g, phi_inv)?,
            tol,
            sampler,
            domain.is_full_product(),
        ))
    } else {
        let inner = domain.clone();
        let inv = phi_inv.clone();
        Ok(FiberedDomain::custom_from_parts(
            label,
            target,
            Arc::new(move |x: &Point, y: &Point| {
                inner.contains(&inv.apply_raw(x), &inv.apply_raw(y))
            }),
            sampler,
            false,
        ))
    }
}

/// Pull a domain back along `v: X' -> X` (for homotopy-equivalence
/// transport).  A full product pulls back to the full product of the new
/// space; other fibered domains compose their maps with `v` and fall back to
/// rejection sampling.
fn pullback_domain(
    domain: &FiberedDomain,
    new_space: &Space,
    v: &MapSpec,
) -> Result<FiberedDomain> {
    if domain.is_full_product() {
        return Ok(FiberedDomain::full_product(new_space));
    }
    let label = format!("{}|{}", domain.label(), v.label());
    if let Some((f, g, tol)) = domain.fibered_maps() {
        FiberedDomain::fibered(
            label,
            MapSpec::compose(f, v)?,
            MapSpec::compose(g, v)?,
            tol,
            PairSampler::Rejection {
                budget: REJECTION_BUDGET,
            },
        )
    } else {
        let inner = domain.clone();
        let vm = v.clone();
        Ok(FiberedDomain::custom(
            label,
            new_space,
            move |x: &Point, y: &Point| inner.contains(&vm.apply_raw(x), &vm.apply_raw(y)),
            PairSampler::Rejection {
                budget: REJECTION_BUDGET,
            },
        ))
    }
}

/// Coordinatewise product of two planners on a declared product space whose
/// factors match the planners' spaces.
///
/// Piece `k` collects all factor-piece products with index sum `k`
/// (anti-diagonal grouping), which yields `a + b - 1` pieces; each factor
/// product becomes one subpart.
pub fn product_planner(left: &Planner, right: &Planner, product_space: &Space) -> Result<Planner> {
    left.require_path_mode("product")?;
    right.require_path_mode("product")?;
    match product_space.factors() {
        Some([a, b]) if a.same_as(left.space()) && b.same_as(right.space()) => {}
        _ => {
            return Err(Error::SpaceMismatch {
                expected: format!(
                    "product of {} and {}",
                    left.space().id(),
                    right.space().id()
                ),
                actual: product_space.id().to_string(),
            })
        }
    }

    let domain = if left.domain().is_full_product() && right.domain().is_full_product() {
        FiberedDomain::full_product(product_space)
    } else {
        let (dl, dr) = (left.domain().clone(), right.domain().clone());
        let ps = product_space.clone();
        FiberedDomain::custom(
            format!("{}*{}", dl.label(), dr.label()),
            product_space,
            move |x: &Point, y: &Point| {
                let Ok((x1, x2)) = split_point(&ps, x) else {
                    return false;
                };
                let Ok((y1, y2)) = split_point(&ps, y) else {
                    return false;
                };
                dl.contains(&x1, &y1) && dr.contains(&x2, &y2)
            },
            PairSampler::ProductOf {
                left: Box::new(left.domain().clone()),
                right: Box::new(right.domain().clone()),
            },
        )
    };

    let (a, b) = (left.piece_count(), right.piece_count());
    let mut pieces = Vec::with_capacity(a + b - 1);
    for k in 0..(a + b - 1) {
        let terms: Vec<(usize, usize)> = (0..a)
            .filter_map(|i| k.checked_sub(i).filter(|j| *j < b).map(|j| (i, j)))
            .collect();
        let mut subparts = Vec::new();
        for &(i, j) in &terms {
            let pl = &left.pieces()[i];
            let pr = &right.pieces()[j];
            for sl in pl.subparts() {
                for sr in pr.subparts() {
                    let (ml, msl) = (pl.membership(), sl.membership());
                    let (mr, msr) = (pr.membership(), sr.membership());
                    let ps = product_space.clone();
                    subparts.push(Subpart::from_parts(
                        format!(
                            "{}:{}|{}:{}",
                            pl.label(),
                            sl.label(),
                            pr.label(),
                            sr.label()
                        ),
                        Arc::new(move |x: &Point, y: &Point| {
                            let Ok((x1, x2)) = split_point(&ps, x) else {
                                return false;
                            };
                            let Ok((y1, y2)) = split_point(&ps, y) else {
                                return false;
                            };
                            ml(&x1, &y1) && msl(&x1, &y1) && mr(&x2, &y2) && msr(&x2, &y2)
                        }),
                    ));
                }
            }
        }
        let membership = {
            let mems: Vec<_> = terms
                .iter()
                .map(|&(i, j)| {
                    (
                        left.pieces()[i].membership(),
                        right.pieces()[j].membership(),
                    )
                })
                .collect();
            let ps = product_space.clone();
            Arc::new(move |x: &Point, y: &Point| {
                let Ok((x1, x2)) = split_point(&ps, x) else {
                    return false;
                };
                let Ok((y1, y2)) = split_point(&ps, y) else {
                    return false;
                };
                mems.iter().any(|(ml, mr)| ml(&x1, &y1) && mr(&x2, &y2))
            })
        };
        let section = {
            let secs: Vec<_> = terms
                .iter()
                .map(|&(i, j)| {
                    (
                        left.pieces()[i].membership(),
                        left.pieces()[i].section_fn(),
                        right.pieces()[j].membership(),
                        right.pieces()[j].section_fn(),
                    )
                })
                .collect();
            let ps = product_space.clone();
            Arc::new(move |x: &Point, y: &Point| -> Result<ParamPath> {
                let (x1, x2) = split_point(&ps, x)?;
                let (y1, y2) = split_point(&ps, y)?;
                for (ml, sl, mr, sr) in &secs {
                    if ml(&x1, &y1) && mr(&x2, &y2) {
                        let pl = sl(&x1, &y1)?;
                        let pr = sr(&x2, &y2)?;
                        let ps2 = ps.clone();
                        return ParamPath::new(
                            &ps,
                            x.clone(),
                            y.clone(),
                            PathMode::Path,
                            move |t| join_points(&ps2, &pl.at(t), &pr.at(t)),
                        );
                    }
                }
                Err(Error::OutsideDomain {
                    x: x.coords().to_vec(),
                    y: y.coords().to_vec(),
                })
            })
        };
        pieces.push(Piece::from_parts(
            format!("sum-{k}"),
            membership,
            subparts,
            section,
        ));
    }
    Planner::new(domain, pieces, PlannerMode::Path, Provenance::Combined)
}

/// Stitch planners on covering domains `A_1, ..., A_r` into one planner on
/// the full product, giving earlier inputs priority where domains overlap.
///
/// Piece `p` of planner `j` becomes `p` minus `A_1 | ... | A_{j-1}`; pieces
/// that end up empty on probe samples are dropped, so the count never exceeds
/// the sum of the inputs' counts.
pub fn combine_cover_planners(planners: &[Planner]) -> Result<Planner> {
    let first = planners
        .first()
        .ok_or_else(|| Error::Config("combine needs at least one planner".into()))?;
    let space = first.space().clone();
    for pl in planners {
        pl.require_path_mode("combine")?;
        if !pl.space().same_as(&space) {
            return Err(Error::SpaceMismatch {
                expected: space.id().to_string(),
                actual: pl.space().id().to_string(),
            });
        }
    }

    let full = FiberedDomain::full_product(&space);
    let probes = full.sample_pairs(PROBE_SAMPLES * 4, PROBE_SEED)?;
    for (x, y) in &probes {
        if !planners.iter().any(|pl| pl.domain().contains(x, y)) {
            return Err(Error::CoverDomainGap {
                x: x.coords().to_vec(),
                y: y.coords().to_vec(),
            });
        }
    }

    let mut pieces = Vec::new();
    for (j, pl) in planners.iter().enumerate() {
        let earlier: Vec<FiberedDomain> =
            planners[..j].iter().map(|p| p.domain().clone()).collect();
        for piece in pl.pieces() {
            let mem = piece.membership();
            let own = pl.domain().clone();
            let shadow = earlier.clone();
            let membership: PairPredicate = Arc::new(move |x: &Point, y: &Point| {
                own.contains(x, y) && mem(x, y) && !shadow.iter().any(|d| d.contains(x, y))
            });
            if !probes.iter().any(|(x, y)| membership(x, y)) {
                continue;
            }
            pieces.push(Piece::from_parts(
                format!("{}:{}", pl.domain().label(), piece.label()),
                membership,
                piece.subparts().to_vec(),
                piece.section_fn(),
            ));
        }
    }
    Planner::new(full, pieces, PlannerMode::Path, Provenance::Combined)
}
