//! Tagged continuous maps between spaces.
//!
//! A [`MapSpec`] couples an evaluator with its source and target spaces and a
//! structural tag.  Tags let downstream code recognize identities, constant
//! maps, and quotient projections without probing the evaluator.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::space::{Point, Space};

#[derive(Clone, Debug)]
pub enum MapTag {
    Identity,
    Constant(Point),
    QuotientProjection,
    Composition,
    Custom,
}

struct MapInner {
    label: String,
    source: Space,
    target: Space,
    tag: MapTag,
    eval: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
}

/// A continuous map `source -> target` with a structural tag.
#[derive(Clone)]
pub struct MapSpec {
    inner: Arc<MapInner>,
}

impl fmt::Debug for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MapSpec({})", self.inner.label)
    }
}

impl MapSpec {
    /// Identity map on `space`; the evaluator returns its input unchanged.
    pub fn identity(space: &Space) -> MapSpec {
        MapSpec {
            inner: Arc::new(MapInner {
                label: format!("id_{}", space.id()),
                source: space.clone(),
                target: space.clone(),
                tag: MapTag::Identity,
                eval: Arc::new(|p: &Point| p.clone()),
            }),
        }
    }

    /// Constant self-map sending everything to `base`; returns `base` exactly.
    pub fn constant(source: &Space, base: Point) -> Result<MapSpec> {
        if base.space_id() != source.id() {
            return Err(Error::Config(format!(
                "constant map base lives on `{}`; pass the matching target space instead",
                base.space_id()
            )));
        }
        let target = source.clone();
        Ok(MapSpec::constant_into(source, &target, base))
    }

    /// Constant map into an explicit target space.
    pub fn constant_into(source: &Space, target: &Space, base: Point) -> MapSpec {
        let b = base.clone();
        MapSpec {
            inner: Arc::new(MapInner {
                label: format!("const_{}", target.id()),
                source: source.clone(),
                target: target.clone(),
                tag: MapTag::Constant(base),
                eval: Arc::new(move |_p: &Point| b.clone()),
            }),
        }
    }

    /// Canonical projection of a total space onto its quotient.
    pub fn quotient_projection(total: &Space, quotient: &Space) -> Result<MapSpec> {
        match quotient.quotient_total() {
            Some(t) if t.same_as(total) => {}
            _ => {
                return Err(Error::NotAQuotient {
                    total: total.id().to_string(),
                    claimed: quotient.id().to_string(),
                })
            }
        }
        let q = quotient.clone();
        Ok(MapSpec {
            inner: Arc::new(MapInner {
                label: format!("proj_{}->{}", total.id(), quotient.id()),
                source: total.clone(),
                target: quotient.clone(),
                tag: MapTag::QuotientProjection,
                eval: Arc::new(move |p: &Point| q.point_unchecked(q.canonicalize(p.coords()))),
            }),
        })
    }

    /// Map defined by an arbitrary total evaluator.
    pub fn custom(
        label: impl Into<String>,
        source: &Space,
        target: &Space,
        eval: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> MapSpec {
        MapSpec {
            inner: Arc::new(MapInner {
                label: label.into(),
                source: source.clone(),
                target: target.clone(),
                tag: MapTag::Custom,
                eval: Arc::new(eval),
            }),
        }
    }

    /// Composition `outer . inner`; errors when the chain does not typecheck.
    pub fn compose(outer: &MapSpec, inner: &MapSpec) -> Result<MapSpec> {
        if !inner.target().same_as(outer.source()) {
            return Err(Error::SpaceMismatch {
                expected: outer.source().id().to_string(),
                actual: inner.target().id().to_string(),
            });
        }
        let o = outer.clone();
        let i = inner.clone();
        Ok(MapSpec {
            inner: Arc::new(MapInner {
                label: format!("{}.{}", outer.label(), inner.label()),
                source: inner.source().clone(),
                target: outer.target().clone(),
                tag: MapTag::Composition,
                eval: Arc::new(move |p: &Point| o.apply_raw(&i.apply_raw(p))),
            }),
        })
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    pub fn source(&self) -> &Space {
        &self.inner.source
    }

    pub fn target(&self) -> &Space {
        &self.inner.target
    }

    pub fn tag(&self) -> &MapTag {
        &self.inner.tag
    }

    /// Base point, when this map is tagged constant.
    pub fn constant_base(&self) -> Option<&Point> {
        match &self.inner.tag {
            MapTag::Constant(b) => Some(b),
            _ => None,
        }
    }

    /// Evaluate without membership checks.  Evaluators are total functions,
    /// so this never fails; use [`MapSpec::apply`] at trust boundaries.
    pub fn apply_raw(&self, p: &Point) -> Point {
        (self.inner.eval)(p)
    }

    /// Evaluate with source and target membership checks.
    pub fn apply(&self, p: &Point) -> Result<Point> {
        self.inner.source.check_point(p)?;
        let out = self.apply_raw(p);
        self.inner.target.check_point(&out)?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_input_exactly() {
        let s1 = Space::circle();
        let id = MapSpec::identity(&s1);
        let p = s1.point(vec![0.6, 0.8]).unwrap();
        let q = id.apply(&p).unwrap();
        assert_eq!(p.coords(), q.coords());
    }

    #[test]
    fn constant_returns_base_exactly() {
        let s1 = Space::circle();
        let base = s1.point(vec![1.0, 0.0]).unwrap();
        let c = MapSpec::constant(&s1, base.clone()).unwrap();
        let p = s1.point(vec![0.0, 1.0]).unwrap();
        assert_eq!(c.apply(&p).unwrap().coords(), base.coords());
        assert!(c.constant_base().is_some());
    }

    #[test]
    fn quotient_projection_lands_on_canonical_rep() {
        let s2 = Space::sphere(2);
        let rp2 = Space::real_projective(2);
        let proj = MapSpec::quotient_projection(&s2, &rp2).unwrap();
        let p = s2.point(vec![-1.0, 0.0, 0.0]).unwrap();
        let image = proj.apply(&p).unwrap();
        assert_eq!(image.coords(), &[1.0, 0.0, 0.0]);
        assert_eq!(image.space_id(), "RP2");
    }

    #[test]
    fn quotient_projection_requires_declared_pairing() {
        let s2 = Space::sphere(2);
        let rp3 = Space::real_projective(3);
        assert!(MapSpec::quotient_projection(&s2, &rp3).is_err());
    }

    #[test]
    fn composition_typechecks() {
        let s2 = Space::sphere(2);
        let rp2 = Space::real_projective(2);
        let proj = MapSpec::quotient_projection(&s2, &rp2).unwrap();
        let id = MapSpec::identity(&s2);
        let chain = MapSpec::compose(&proj, &id).unwrap();
        let p = s2.point(vec![0.0, -1.0, 0.0]).unwrap();
        assert_eq!(chain.apply(&p).unwrap().coords(), &[0.0, 1.0, 0.0]);
        assert!(MapSpec::compose(&id, &proj).is_err());
    }
}
