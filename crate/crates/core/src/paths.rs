//! Parametrized paths and geodesics.
//!
//! A [`ParamPath`] is a total evaluator on `[0, 1]` together with declared
//! endpoints; construction checks that the evaluator actually starts and ends
//! where declared (tolerance [`EPS_SPACE`]), and loop modes additionally
//! require the endpoints to coincide.  Concatenation glues at tolerance
//! [`EPS_GLUE`] and reparametrizes by halves or thirds.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Point, Space, EPS_SPACE};

/// Default tolerance for concatenation glue gaps.
pub const EPS_GLUE: f64 = 1e-9;

/// Below this transversal norm, the second endpoint of a sphere geodesic is
/// treated as lying on the axis through the first (equal or antipodal).
const AXIS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    /// Ordinary path from `start` to `end`.
    Path,
    /// Loop: `start == end`.
    FreeLoop,
    /// Loop pinned at a planner-level basepoint: `start == end == base`.
    BasedLoop,
}

impl PathMode {
    pub fn is_loop(self) -> bool {
        matches!(self, PathMode::FreeLoop | PathMode::BasedLoop)
    }
}

type PathEval = Arc<dyn Fn(f64) -> Point + Send + Sync>;

struct PathInner {
    space: Space,
    eval: PathEval,
    start: Point,
    end: Point,
    mode: PathMode,
}

/// A continuous path in a space, evaluated anywhere on `[0, 1]`.
#[derive(Clone)]
pub struct ParamPath {
    inner: Arc<PathInner>,
}

impl ParamPath {
    /// Wrap an evaluator, checking the declared endpoint contract.
    pub fn new(
        space: &Space,
        start: Point,
        end: Point,
        mode: PathMode,
        eval: impl Fn(f64) -> Point + Send + Sync + 'static,
    ) -> Result<ParamPath> {
        let eval: PathEval = Arc::new(eval);
        let at0 = eval(0.0);
        let at1 = eval(1.0);
        let d0 = space.dist_coords(at0.coords(), start.coords());
        if d0 > EPS_SPACE {
            return Err(Error::EndpointContract {
                t: 0.0,
                dev: d0,
                tol: EPS_SPACE,
            });
        }
        let d1 = space.dist_coords(at1.coords(), end.coords());
        if d1 > EPS_SPACE {
            return Err(Error::EndpointContract {
                t: 1.0,
                dev: d1,
                tol: EPS_SPACE,
            });
        }
        if mode.is_loop() {
            let gap = space.dist_coords(start.coords(), end.coords());
            if gap > EPS_SPACE {
                return Err(Error::OpenLoop { dev: gap });
            }
        }
        Ok(ParamPath {
            inner: Arc::new(PathInner {
                space: space.clone(),
                eval,
                start,
                end,
                mode,
            }),
        })
    }

    /// Constant path sitting at `p`.
    pub fn constant(space: &Space, p: Point) -> Result<ParamPath> {
        let q = p.clone();
        ParamPath::new(space, p.clone(), p, PathMode::Path, move |_t| q.clone())
    }

    pub fn space(&self) -> &Space {
        &self.inner.space
    }

    pub fn start(&self) -> &Point {
        &self.inner.start
    }

    pub fn end(&self) -> &Point {
        &self.inner.end
    }

    pub fn mode(&self) -> PathMode {
        self.inner.mode
    }

    /// Evaluate at `t`, rejecting parameters outside `[0, 1]`.
    pub fn eval(&self, t: f64) -> Result<Point> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ParamOutOfRange { t });
        }
        Ok((self.inner.eval)(t))
    }

    /// Evaluate at `t` assuming `t` is already in range.
    pub(crate) fn at(&self, t: f64) -> Point {
        (self.inner.eval)(t)
    }

    /// Same path traversed backwards.
    pub fn reverse(&self) -> ParamPath {
        let eval = Arc::clone(&self.inner.eval);
        ParamPath {
            inner: Arc::new(PathInner {
                space: self.inner.space.clone(),
                eval: Arc::new(move |t| eval(1.0 - t)),
                start: self.inner.end.clone(),
                end: self.inner.start.clone(),
                mode: self.inner.mode,
            }),
        }
    }

    /// Rebuild with the clock running at `factor` speed, keeping the declared
    /// endpoints and skipping revalidation.  Only for corruption fixtures,
    /// which need paths that break their own declarations.
    pub(crate) fn time_scaled_unchecked(&self, factor: f64) -> ParamPath {
        let eval = Arc::clone(&self.inner.eval);
        ParamPath {
            inner: Arc::new(PathInner {
                space: self.inner.space.clone(),
                eval: Arc::new(move |t| eval(factor * t)),
                start: self.inner.start.clone(),
                end: self.inner.end.clone(),
                mode: self.inner.mode,
            }),
        }
    }

    /// Rebuild with every output pushed through `warp`, keeping the declared
    /// endpoints and skipping revalidation.  Only for corruption fixtures.
    pub(crate) fn warped_unchecked(
        &self,
        warp: impl Fn(Point, f64) -> Point + Send + Sync + 'static,
    ) -> ParamPath {
        let eval = Arc::clone(&self.inner.eval);
        ParamPath {
            inner: Arc::new(PathInner {
                space: self.inner.space.clone(),
                eval: Arc::new(move |t| warp(eval(t), t)),
                start: self.inner.start.clone(),
                end: self.inner.end.clone(),
                mode: self.inner.mode,
            }),
        }
    }

    /// Re-declare the mode, revalidating the loop contract when needed.
    pub fn with_mode(&self, mode: PathMode) -> Result<ParamPath> {
        if mode.is_loop() {
            let gap = self
                .inner
                .space
                .dist_coords(self.inner.start.coords(), self.inner.end.coords());
            if gap > EPS_SPACE {
                return Err(Error::OpenLoop { dev: gap });
            }
        }
        Ok(ParamPath {
            inner: Arc::new(PathInner {
                space: self.inner.space.clone(),
                eval: Arc::clone(&self.inner.eval),
                start: self.inner.start.clone(),
                end: self.inner.end.clone(),
                mode,
            }),
        })
    }
}

fn check_glue(space: &Space, a: &Point, b: &Point) -> Result<()> {
    let gap = space.dist_coords(a.coords(), b.coords());
    if gap > EPS_GLUE {
        return Err(Error::GlueGap { gap, tol: EPS_GLUE });
    }
    Ok(())
}

/// Concatenate three paths on equal thirds of `[0, 1]`.
pub fn concat_thirds(p1: &ParamPath, p2: &ParamPath, p3: &ParamPath) -> Result<ParamPath> {
    let space = p1.space().clone();
    check_glue(&space, p1.end(), p2.start())?;
    check_glue(&space, p2.end(), p3.start())?;
    let (a, b, c) = (p1.clone(), p2.clone(), p3.clone());
    ParamPath::new(
        &space,
        p1.start().clone(),
        p3.end().clone(),
        PathMode::Path,
        move |t| {
            if t <= 1.0 / 3.0 {
                a.at((3.0 * t).min(1.0))
            } else if t <= 2.0 / 3.0 {
                b.at(3.0 * t - 1.0)
            } else {
                c.at((3.0 * t - 2.0).min(1.0))
            }
        },
    )
}

/// Concatenate two paths on equal halves of `[0, 1]`.
pub fn concat_halves(p1: &ParamPath, p2: &ParamPath) -> Result<ParamPath> {
    let space = p1.space().clone();
    check_glue(&space, p1.end(), p2.start())?;
    let (a, b) = (p1.clone(), p2.clone());
    ParamPath::new(
        &space,
        p1.start().clone(),
        p2.end().clone(),
        PathMode::Path,
        move |t| {
            if t <= 0.5 {
                a.at((2.0 * t).min(1.0))
            } else {
                b.at(2.0 * t - 1.0)
            }
        },
    )
}

/// Constant-speed geodesic from `x` to `y`.
///
/// On spheres the minimizing arc is unique unless the points are antipodal;
/// in that case a tangential `hint` direction at `x` selects the half great
/// circle, and without one the call fails with
/// [`Error::AntipodalAmbiguity`].  Products interpolate factor-wise, and
/// quotients lift to the nearest orbit representative in the total space.
pub fn geodesic(space: &Space, x: &Point, y: &Point, hint: Option<&[f64]>) -> Result<ParamPath> {
    space.check_point(x)?;
    space.check_point(y)?;
    geodesic_impl(space, x, y, hint)
}

fn geodesic_impl(space: &Space, x: &Point, y: &Point, hint: Option<&[f64]>) -> Result<ParamPath> {
    if let Some(factors) = space.factors() {
        return product_geodesic(space, factors, x, y);
    }
    if let Some(total) = space.quotient_total() {
        return quotient_geodesic(space, total, x, y, hint);
    }
    if space.ambient_dim() == 1 {
        // Interval: straight-line interpolation.
        let (a, b) = (x.coords()[0], y.coords()[0]);
        let s = space.clone();
        return ParamPath::new(space, x.clone(), y.clone(), PathMode::Path, move |t| {
            s.point_unchecked(vec![(1.0 - t) * a + t * b])
        });
    }
    sphere_arc(space, x, y, hint)
}

/// Great-circle arc `t -> cos(t theta) x + sin(t theta) u` where `u` is the
/// unit transversal component of `y` (or of the hint at antipodes).
fn sphere_arc(space: &Space, x: &Point, y: &Point, hint: Option<&[f64]>) -> Result<ParamPath> {
    let xc = x.coords().to_vec();
    let yc = y.coords();
    let dot: f64 = xc.iter().zip(yc).map(|(a, b)| a * b).sum();
    let dot = dot.clamp(-1.0, 1.0);
    let trans: Vec<f64> = yc.iter().zip(&xc).map(|(b, a)| b - dot * a).collect();
    let norm = trans.iter().map(|v| v * v).sum::<f64>().sqrt();

    if norm <= AXIS_TOL {
        if dot >= 0.0 {
            // Nearly equal endpoints: normalized chord interpolation.
            let s = space.clone();
            let (xa, ya) = (xc, yc.to_vec());
            return ParamPath::new(space, x.clone(), y.clone(), PathMode::Path, move |t| {
                let raw: Vec<f64> = xa
                    .iter()
                    .zip(&ya)
                    .map(|(a, b)| (1.0 - t) * a + t * b)
                    .collect();
                s.point_unchecked(s.project_coords(&raw))
            });
        }
        let hint = hint.ok_or(Error::AntipodalAmbiguity)?;
        let hdot: f64 = hint.iter().zip(&xc).map(|(h, a)| h * a).sum();
        let tang: Vec<f64> = hint.iter().zip(&xc).map(|(h, a)| h - hdot * a).collect();
        let tnorm = tang.iter().map(|v| v * v).sum::<f64>().sqrt();
        if tnorm <= 1e-9 {
            return Err(Error::DegenerateHint);
        }
        let axis: Vec<f64> = tang.into_iter().map(|v| v / tnorm).collect();
        let s = space.clone();
        let theta = std::f64::consts::PI;
        return ParamPath::new(space, x.clone(), y.clone(), PathMode::Path, move |t| {
            let (c, sn) = ((t * theta).cos(), (t * theta).sin());
            s.point_unchecked(xc.iter().zip(&axis).map(|(a, u)| c * a + sn * u).collect())
        });
    }

    let axis: Vec<f64> = trans.into_iter().map(|v| v / norm).collect();
    let theta = norm.atan2(dot);
    let s = space.clone();
    ParamPath::new(space, x.clone(), y.clone(), PathMode::Path, move |t| {
        let (c, sn) = ((t * theta).cos(), (t * theta).sin());
        s.point_unchecked(xc.iter().zip(&axis).map(|(a, u)| c * a + sn * u).collect())
    })
}

fn product_geodesic(space: &Space, factors: &[Space], x: &Point, y: &Point) -> Result<ParamPath> {
    let mut parts = Vec::with_capacity(factors.len());
    let mut off = 0;
    for f in factors {
        let d = f.ambient_dim();
        let fx = f.point_unchecked(x.coords()[off..off + d].to_vec());
        let fy = f.point_unchecked(y.coords()[off..off + d].to_vec());
        parts.push(geodesic_impl(f, &fx, &fy, None)?);
        off += d;
    }
    let s = space.clone();
    ParamPath::new(space, x.clone(), y.clone(), PathMode::Path, move |t| {
        let mut coords = Vec::with_capacity(s.ambient_dim());
        for p in &parts {
            coords.extend_from_slice(p.at(t).coords());
        }
        s.point_unchecked(coords)
    })
}

fn quotient_geodesic(
    space: &Space,
    total: &Space,
    x: &Point,
    y: &Point,
    hint: Option<&[f64]>,
) -> Result<ParamPath> {
    let orbit = space.orbit().expect("quotient spaces carry an orbit");
    let mut best: Option<(f64, Vec<f64>)> = None;
    for g in orbit {
        let gy = g.apply(y.coords());
        let d = total.dist_coords(x.coords(), &gy);
        if best.as_ref().map(|(bd, _)| d < *bd).unwrap_or(true) {
            best = Some((d, gy));
        }
    }
    let (_, rep) = best.expect("orbit is never empty");
    let tx = total.point_unchecked(x.coords().to_vec());
    let ty = total.point_unchecked(rep);
    let lifted = geodesic_impl(total, &tx, &ty, hint)?;
    let s = space.clone();
    ParamPath::new(space, x.clone(), y.clone(), PathMode::Path, move |t| {
        s.point_unchecked(lifted.at(t).coords().to_vec())
    })
}
