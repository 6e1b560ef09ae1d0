//! Homotopies between tagged maps.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{seeded_rng, MapSpec, Point, Space};

type HomotopyEval = Arc<dyn Fn(&Point, f64) -> Point + Send + Sync>;

struct HomotopyInner {
    label: String,
    space: Space,
    at_zero: MapSpec,
    at_one: MapSpec,
    eval: HomotopyEval,
}

/// A homotopy `H : space x [0, 1] -> space` with declared endpoint maps
/// `H(., 0) = at_zero` and `H(., 1) = at_one`.
#[derive(Clone)]
pub struct HomotopySpec {
    inner: Arc<HomotopyInner>,
}

impl fmt::Debug for HomotopySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomotopySpec({})", self.inner.label)
    }
}

impl HomotopySpec {
    pub fn new(
        label: impl Into<String>,
        space: &Space,
        at_zero: MapSpec,
        at_one: MapSpec,
        eval: impl Fn(&Point, f64) -> Point + Send + Sync + 'static,
    ) -> HomotopySpec {
        HomotopySpec {
            inner: Arc::new(HomotopyInner {
                label: label.into(),
                space: space.clone(),
                at_zero,
                at_one,
                eval: Arc::new(eval),
            }),
        }
    }

    /// The homotopy that sits still at the identity.
    pub fn stationary_identity(space: &Space) -> HomotopySpec {
        let id = MapSpec::identity(space);
        HomotopySpec::new(
            format!("still_{}", space.id()),
            space,
            id.clone(),
            id,
            |p: &Point, _t| p.clone(),
        )
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn space(&self) -> &Space {
        &self.inner.space
    }

    pub fn at_zero(&self) -> &MapSpec {
        &self.inner.at_zero
    }

    pub fn at_one(&self) -> &MapSpec {
        &self.inner.at_one
    }

    pub fn eval(&self, p: &Point, t: f64) -> Point {
        (self.inner.eval)(p, t)
    }

    /// Same homotopy run backwards in time.
    pub fn reversed(&self) -> HomotopySpec {
        let eval = Arc::clone(&self.inner.eval);
        HomotopySpec {
            inner: Arc::new(HomotopyInner {
                label: format!("{}^-", self.inner.label),
                space: self.inner.space.clone(),
                at_zero: self.inner.at_one.clone(),
                at_one: self.inner.at_zero.clone(),
                eval: Arc::new(move |p, t| eval(p, 1.0 - t)),
            }),
        }
    }

    /// Check the declared endpoint maps against the evaluator on `n` sampled
    /// points, at tolerance `eps`.
    pub fn validate(&self, n: usize, seed: u64, eps: f64) -> Result<()> {
        let mut rng = seeded_rng(seed);
        let space = &self.inner.space;
        let mut worst_zero = 0.0_f64;
        let mut worst_one = 0.0_f64;
        for _ in 0..n {
            let p = space.sample(&mut rng);
            let h0 = self.eval(&p, 0.0);
            let h1 = self.eval(&p, 1.0);
            let m0 = self.inner.at_zero.apply_raw(&p);
            let m1 = self.inner.at_one.apply_raw(&p);
            worst_zero = worst_zero.max(space.dist_coords(h0.coords(), m0.coords()));
            worst_one = worst_one.max(space.dist_coords(h1.coords(), m1.coords()));
        }
        if worst_zero > eps {
            return Err(Error::InvalidHomotopy {
                label: self.inner.label.clone(),
                end: "t=0".into(),
                dev: worst_zero,
            });
        }
        if worst_one > eps {
            return Err(Error::InvalidHomotopy {
                label: self.inner.label.clone(),
                end: "t=1".into(),
                dev: worst_one,
            });
        }
        Ok(())
    }
}
