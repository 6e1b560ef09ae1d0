//! Partition-based motion planners.
//!
//! A [`Planner`] covers a pair domain `A` inside `X x X` with finitely many
//! pairwise-disjoint pieces.  Each [`Piece`] carries a section: a continuous
//! rule assigning every member pair `(x, y)` a path from `x` to `y`, or in
//! the loop variants a loop through `x` that passes through `y` at time 1/2.
//! The piece count of a valid planner is an upper bound witness for the
//! topological complexity of the domain.
//!
//! Pieces may be disconnected unions of separated subparts (for example the
//! diagonal and antidiagonal components of an antipodal domain, or the
//! `F1 x F2 | F2 x F1` constituents of a product piece).  Subparts exist for
//! continuity bookkeeping: nearby sample pairs are only compared when they
//! share both piece and subpart, since cross-subpart neighbors meet only at
//! corners that belong to other pieces.

pub(crate) mod builtins;
mod cat;
mod corrupt;
mod homotopy;
mod ops;

use std::fmt;
use std::sync::Arc;

pub use builtins::{
    circle_off_antipodal_planner, circle_off_diagonal_planner, circle_planner, diagonal_planner,
    sphere_antipodal_planner, CIRCLE_SEAM_HALF_WIDTH, SPHERE_EVEN_CAP_THRESHOLD,
};
pub use cat::{
    base_slice_domain, based_loop_planner_from_cat, cat_cover_to_planner, planner_to_cat_cover,
    CatEntry, CatWitness,
};
pub use corrupt::{corrupt_planner, seam_discontinuity_planner, Corruption};
pub use homotopy::HomotopySpec;
pub use ops::{combine_cover_planners, pair_space, product_planner};

use crate::error::{Error, Result};
use crate::geometry::{FiberedDomain, Point, Space};
use crate::paths::{ParamPath, PathMode};

pub type PairPredicate = Arc<dyn Fn(&Point, &Point) -> bool + Send + Sync>;
pub type SectionFn = Arc<dyn Fn(&Point, &Point) -> Result<ParamPath> + Send + Sync>;

/// What the sections of a planner promise.
#[derive(Clone, Debug)]
pub enum PlannerMode {
    /// Sections produce paths from `x` to `y`.
    Path,
    /// Sections produce loops based at `x` passing through `y` at `t = 1/2`.
    FreeLoop,
    /// Sections produce loops pinned at `base` passing through `y` at
    /// `t = 1/2`; the domain is the slice `{base} x X`.
    BasedLoop { base: Point },
}

impl PlannerMode {
    pub fn name(&self) -> &'static str {
        match self {
            PlannerMode::Path => "path",
            PlannerMode::FreeLoop => "free-loop",
            PlannerMode::BasedLoop { .. } => "based-loop",
        }
    }

    pub fn is_loop(&self) -> bool {
        !matches!(self, PlannerMode::Path)
    }

    pub(crate) fn path_mode(&self) -> PathMode {
        match self {
            PlannerMode::Path => PathMode::Path,
            PlannerMode::FreeLoop => PathMode::FreeLoop,
            PlannerMode::BasedLoop { .. } => PathMode::BasedLoop,
        }
    }
}

/// How a planner came to be.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Builtin(&'static str),
    Restricted,
    Transported,
    Combined,
    Converted,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Builtin(name) => write!(f, "builtin:{name}"),
            Provenance::Restricted => write!(f, "restricted"),
            Provenance::Transported => write!(f, "transported"),
            Provenance::Combined => write!(f, "combined"),
            Provenance::Converted => write!(f, "converted"),
        }
    }
}

/// A labelled subset of a piece on which the section is continuous.
#[derive(Clone)]
pub struct Subpart {
    label: String,
    membership: PairPredicate,
}

impl Subpart {
    pub fn new(
        label: impl Into<String>,
        membership: impl Fn(&Point, &Point) -> bool + Send + Sync + 'static,
    ) -> Subpart {
        Subpart {
            label: label.into(),
            membership: Arc::new(membership),
        }
    }

    pub(crate) fn from_parts(label: String, membership: PairPredicate) -> Subpart {
        Subpart { label, membership }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, x: &Point, y: &Point) -> bool {
        (self.membership)(x, y)
    }

    pub(crate) fn membership(&self) -> PairPredicate {
        Arc::clone(&self.membership)
    }
}

/// One member of a planner partition: a membership predicate, a subpart
/// decomposition of it, and a section.
#[derive(Clone)]
pub struct Piece {
    label: String,
    membership: PairPredicate,
    subparts: Vec<Subpart>,
    section: SectionFn,
}

impl Piece {
    /// Piece with a single subpart spanning the whole piece.
    pub fn new(
        label: impl Into<String>,
        membership: impl Fn(&Point, &Point) -> bool + Send + Sync + 'static,
        section: impl Fn(&Point, &Point) -> Result<ParamPath> + Send + Sync + 'static,
    ) -> Piece {
        let label = label.into();
        let subparts = vec![Subpart::new("all", |_: &Point, _: &Point| true)];
        Piece {
            label,
            membership: Arc::new(membership),
            subparts,
            section: Arc::new(section),
        }
    }

    /// Piece with an explicit subpart decomposition.  Every member pair must
    /// satisfy exactly one subpart predicate.
    pub fn with_subparts(
        label: impl Into<String>,
        membership: impl Fn(&Point, &Point) -> bool + Send + Sync + 'static,
        subparts: Vec<Subpart>,
        section: impl Fn(&Point, &Point) -> Result<ParamPath> + Send + Sync + 'static,
    ) -> Piece {
        Piece {
            label: label.into(),
            membership: Arc::new(membership),
            subparts,
            section: Arc::new(section),
        }
    }

    pub(crate) fn from_parts(
        label: String,
        membership: PairPredicate,
        subparts: Vec<Subpart>,
        section: SectionFn,
    ) -> Piece {
        Piece {
            label,
            membership,
            subparts,
            section,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn subparts(&self) -> &[Subpart] {
        &self.subparts
    }

    pub fn contains(&self, x: &Point, y: &Point) -> bool {
        (self.membership)(x, y)
    }

    pub(crate) fn membership(&self) -> PairPredicate {
        Arc::clone(&self.membership)
    }

    pub(crate) fn section_fn(&self) -> SectionFn {
        Arc::clone(&self.section)
    }

    /// Index of the unique subpart containing a member pair.
    pub fn subpart_of(&self, x: &Point, y: &Point) -> Result<usize> {
        let mut found = None;
        let mut count = 0;
        for (i, sp) in self.subparts.iter().enumerate() {
            if sp.contains(x, y) {
                count += 1;
                if found.is_none() {
                    found = Some(i);
                }
            }
        }
        match (found, count) {
            (Some(i), 1) => Ok(i),
            _ => Err(Error::SubpartViolation {
                count,
                piece: self.label.clone(),
                x: x.coords().to_vec(),
                y: y.coords().to_vec(),
            }),
        }
    }

    /// Evaluate the section at a member pair.
    pub fn section(&self, x: &Point, y: &Point) -> Result<ParamPath> {
        (self.section)(x, y)
    }
}

/// A partition-based motion planner.
#[derive(Clone)]
pub struct Planner {
    space: Space,
    domain: FiberedDomain,
    pieces: Vec<Piece>,
    mode: PlannerMode,
    provenance: Provenance,
}

impl fmt::Debug for Planner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Planner({} on {}, {} pieces, {} mode, {})",
            self.domain.label(),
            self.space.id(),
            self.pieces.len(),
            self.mode.name(),
            self.provenance
        )
    }
}

impl Planner {
    pub fn new(
        domain: FiberedDomain,
        pieces: Vec<Piece>,
        mode: PlannerMode,
        provenance: Provenance,
    ) -> Result<Planner> {
        if pieces.is_empty() {
            return Err(Error::Config("a planner needs at least one piece".into()));
        }
        let space = domain.space().clone();
        if let PlannerMode::BasedLoop { base } = &mode {
            space.check_point(base)?;
        }
        Ok(Planner {
            space,
            domain,
            pieces,
            mode,
            provenance,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn domain(&self) -> &FiberedDomain {
        &self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn mode(&self) -> &PlannerMode {
        &self.mode
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Index of the unique piece containing `(x, y)`, with partition errors
    /// when zero or several pieces claim the pair.
    pub fn piece_index_of(&self, x: &Point, y: &Point) -> Result<usize> {
        let mut found = None;
        let mut labels = Vec::new();
        for (i, piece) in self.pieces.iter().enumerate() {
            if piece.contains(x, y) {
                labels.push(piece.label().to_string());
                if found.is_none() {
                    found = Some(i);
                }
            }
        }
        match (found, labels.len()) {
            (Some(i), 1) => Ok(i),
            (None, _) => Err(Error::CoverageGap {
                x: x.coords().to_vec(),
                y: y.coords().to_vec(),
            }),
            (_, count) => Err(Error::PartitionViolation {
                count,
                labels,
                x: x.coords().to_vec(),
                y: y.coords().to_vec(),
            }),
        }
    }

    /// Plan for a member pair: the section path plus the indices of the piece
    /// and subpart that served it.
    pub fn evaluate(&self, x: &Point, y: &Point) -> Result<(ParamPath, usize, usize)> {
        self.domain.check_member(x, y)?;
        let pi = self.piece_index_of(x, y)?;
        let piece = &self.pieces[pi];
        let si = piece.subpart_of(x, y)?;
        let path = piece.section(x, y)?;
        Ok((path, pi, si))
    }

    /// Replace the pieces, keeping everything else.
    pub(crate) fn with_parts(
        &self,
        domain: FiberedDomain,
        pieces: Vec<Piece>,
        mode: PlannerMode,
        provenance: Provenance,
    ) -> Result<Planner> {
        Planner::new(domain, pieces, mode, provenance)
    }

    /// Error unless this planner is in path mode.
    pub(crate) fn require_path_mode(&self, op: &str) -> Result<()> {
        match self.mode {
            PlannerMode::Path => Ok(()),
            _ => Err(Error::ModeMismatch {
                expected: format!("path ({op})"),
                actual: self.mode.name().to_string(),
            }),
        }
    }
}
