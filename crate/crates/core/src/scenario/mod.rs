//! Declarative scenario layer: a JSON document names a space, a planner
//! recipe, and verification tunables; running it builds the planner, runs
//! every applicable check, writes a JSON report, and optionally exports
//! sampled path polylines.
//!
//! Recipes are trees: leaves name builtin planners, interior nodes apply the
//! planner combinators (restriction, the two transports, domination,
//! products, combination, loop conversion, the category-cover round trips,
//! and the deliberate corruptions used as negative controls).  All referenced
//! spaces, domains, isomorphisms, equivalences, and domination setups come
//! from small registries in this module, so a scenario file is self-contained
//! and reproducible.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    FiberedDomain, MapSpec, PairSampler, Point, Space, FIBER_TOL, REJECTION_BUDGET,
};
use crate::planner::{
    base_slice_domain, based_loop_planner_from_cat, cat_cover_to_planner,
    circle_off_antipodal_planner, circle_off_diagonal_planner, circle_planner,
    combine_cover_planners, corrupt_planner, diagonal_planner, pair_space, planner_to_cat_cover,
    product_planner, seam_discontinuity_planner, sphere_antipodal_planner, CatWitness, Corruption,
    HomotopySpec, Planner,
};
use crate::verify::{verify_planner, VerificationConfig, VerificationReport};

/// Builtin planner names accepted by [`RecipeConfig::Builtin`].
pub const BUILTIN_PLANNERS: &[&str] = &[
    "circle",
    "circle-off-antipodal",
    "circle-off-diagonal",
    "diagonal",
    "sphere-antipodal-1",
    "sphere-antipodal-2",
    "sphere-antipodal-3",
    "seam-discontinuity",
];

/// Named pair domains accepted by [`RecipeConfig::Restrict`].
pub const NAMED_DOMAINS: &[&str] = &["fiber-product", "near-diagonal-band"];

/// Named bundle isomorphisms accepted by [`RecipeConfig::TransportIso`].
pub const NAMED_ISOS: &[&str] = &["rotate-quarter", "swap-factors"];

/// Named fiberwise homotopy equivalences for [`RecipeConfig::TransportFhe`].
pub const NAMED_EQUIVALENCES: &[&str] = &["circle-to-cylinder", "cylinder-to-circle"];

/// Named domination setups for [`RecipeConfig::Dominate`].
pub const NAMED_DOMINATIONS: &[&str] = &["retract-band-to-diagonal"];

/// Half-width (intrinsic distance) of the `near-diagonal-band` domain.
pub const BAND_HALF_WIDTH: f64 = FRAC_PI_2;

/// A map named in a scenario, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapConfig {
    /// The identity of the scenario space.
    Identity,
    /// The constant map at `base` (chart coordinates).
    Constant { base: Vec<f64> },
    /// The projection onto a named quotient of the scenario space.
    QuotientProjection { quotient: String },
}

/// A planner recipe tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RecipeConfig {
    /// A builtin planner; see [`BUILTIN_PLANNERS`].
    Builtin { name: String },
    /// Restriction of the inner planner to a named domain.
    Restrict {
        inner: Box<RecipeConfig>,
        domain: String,
    },
    /// Conjugation by a named bundle isomorphism.
    TransportIso {
        inner: Box<RecipeConfig>,
        iso: String,
    },
    /// Transport along a named fiberwise homotopy equivalence.
    TransportFhe {
        inner: Box<RecipeConfig>,
        equivalence: String,
    },
    /// Extension to a larger domain that deformation-retracts into the
    /// planner's own domain.
    Dominate {
        inner: Box<RecipeConfig>,
        setup: String,
    },
    /// Coordinatewise product on a named product space.
    Product {
        left: Box<RecipeConfig>,
        right: Box<RecipeConfig>,
        space: String,
    },
    /// Priority combination of planners on overlapping domains.
    Combine { parts: Vec<RecipeConfig> },
    /// Forward-then-back free-loop conversion.
    ToLoop { inner: Box<RecipeConfig> },
    /// Category-cover round trip: planner -> cover witness -> planner.  The
    /// witness rides along into verification.
    CatRoundTrip { inner: Box<RecipeConfig> },
    /// Based-loop planner rebuilt from the inner planner's cover witness.
    BasedLoopFromCat { inner: Box<RecipeConfig> },
    /// Deliberately broken variant used as a negative control.
    Corrupt {
        inner: Box<RecipeConfig>,
        corruption: Corruption,
    },
}

/// One endpoint pair of an export request (chart coordinates).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// A path-polyline export request.  The file extension selects the format:
/// `.jsonl` for JSON lines, `.tsv` for columnar text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExportRequest {
    pub file: String,
    pub pairs: Vec<PairConfig>,
    /// Grid points per path, including both endpoints.
    pub samples: usize,
}

/// One scenario: space, optional fibering maps, recipe, verification
/// tunables, and optional piece-count expectation and exports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Registry name of the planner's space (after all transports).
    pub space: String,
    /// Fibering maps used by the `fiber-product` domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<MapConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<MapConfig>,
    pub planner: RecipeConfig,
    #[serde(default)]
    pub verification: VerificationConfig,
    /// When set, the run only passes if the built planner has exactly this
    /// many pieces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_piece_count: Option<usize>,
    /// Where the expected count comes from (documentation only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count_note: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exports: Vec<ExportRequest>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<ScenarioConfig> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ScenarioConfig> {
        let text = fs::read_to_string(path)?;
        ScenarioConfig::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Static checks: the space resolves, every name in the recipe tree is
    /// registered, arities make sense, and the verification tunables are
    /// sane.  Construction-level errors (mismatched spaces, bad coordinates)
    /// surface later when the recipe is built.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Config("scenario name must not be empty".into()));
        }
        Space::by_name(&self.space)?;
        self.verification.validate()?;
        validate_recipe(&self.planner)?;
        for req in &self.exports {
            if req.samples < 2 {
                return Err(Error::Config(format!(
                    "export `{}` needs at least 2 samples per path",
                    req.file
                )));
            }
            if req.pairs.is_empty() {
                return Err(Error::Config(format!(
                    "export `{}` lists no pairs",
                    req.file
                )));
            }
            export_format(Path::new(&req.file))?;
        }
        Ok(())
    }
}

fn check_registered(kind: &str, name: &str, registry: &[&str]) -> Result<()> {
    if registry.contains(&name) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "unknown {kind} `{name}`; registered: {registry:?}"
        )))
    }
}

fn validate_recipe(recipe: &RecipeConfig) -> Result<()> {
    match recipe {
        RecipeConfig::Builtin { name } => {
            check_registered("builtin planner", name, BUILTIN_PLANNERS)
        }
        RecipeConfig::Restrict { inner, domain } => {
            check_registered("domain", domain, NAMED_DOMAINS)?;
            validate_recipe(inner)
        }
        RecipeConfig::TransportIso { inner, iso } => {
            check_registered("isomorphism", iso, NAMED_ISOS)?;
            validate_recipe(inner)
        }
        RecipeConfig::TransportFhe { inner, equivalence } => {
            check_registered("equivalence", equivalence, NAMED_EQUIVALENCES)?;
            validate_recipe(inner)
        }
        RecipeConfig::Dominate { inner, setup } => {
            check_registered("domination setup", setup, NAMED_DOMINATIONS)?;
            validate_recipe(inner)
        }
        RecipeConfig::Product { left, right, space } => {
            Space::by_name(space)?;
            validate_recipe(left)?;
            validate_recipe(right)
        }
        RecipeConfig::Combine { parts } => {
            if parts.is_empty() {
                return Err(Error::Config("combine needs at least one part".into()));
            }
            parts.iter().try_for_each(validate_recipe)
        }
        RecipeConfig::ToLoop { inner }
        | RecipeConfig::CatRoundTrip { inner }
        | RecipeConfig::BasedLoopFromCat { inner }
        | RecipeConfig::Corrupt { inner, .. } => validate_recipe(inner),
    }
}

/// Build the scenario's planner (and category witness, for the cover-based
/// recipes) without running verification.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<(Planner, Option<CatWitness>)> {
    cfg.validate()?;
    let space = Space::by_name(&cfg.space)?;
    let (planner, witness) = build_recipe(cfg, &cfg.planner, &space)?;
    if !planner.space().same_as(&space) {
        return Err(Error::SpaceMismatch {
            expected: space.id().to_string(),
            actual: planner.space().id().to_string(),
        });
    }
    Ok((planner, witness))
}

fn build_recipe(
    cfg: &ScenarioConfig,
    recipe: &RecipeConfig,
    scenario_space: &Space,
) -> Result<(Planner, Option<CatWitness>)> {
    match recipe {
        RecipeConfig::Builtin { name } => Ok((builtin_planner(name, scenario_space)?, None)),
        RecipeConfig::Restrict { inner, domain } => {
            let (pl, _) = build_recipe(cfg, inner, scenario_space)?;
            let dom = named_domain(cfg, domain, pl.space())?;
            Ok((pl.restrict(dom)?, None))
        }
        RecipeConfig::TransportIso { inner, iso } => {
            let (pl, _) = build_recipe(cfg, inner, scenario_space)?;
            let (phi, phi_inv) = named_iso(iso, pl.space())?;
            Ok((pl.transport_bundle_iso(&phi, &phi_inv)?, None))
        }
        RecipeConfig::TransportFhe { inner, equivalence } => {
            let (pl, _) = build_recipe(cfg, inner, scenario_space)?;
            let (u, v, h, h_back) = named_equivalence(equivalence)?;
            Ok((pl.transport_fhe(&u, &v, &h, &h_back)?, None))
        }
        RecipeConfig::Dominate { inner, setup } => {
            let (pl, _) = build_recipe(cfg, inner, scenario_space)?;
            let (target, deform) = named_domination(setup, pl.space())?;
            Ok((pl.dominate(target, &deform)?, None))
        }
        RecipeConfig::Product { left, right, space } => {
            let product_space = Space::by_name(space)?;
            let (l, _) = build_recipe(cfg, left, scenario_space)?;
            let (r, _) = build_recipe(cfg, right, scenario_space)?;
            Ok((product_planner(&l, &r, &product_space)?, None))
        }
        RecipeConfig::Combine { parts } => {
            let built = parts
                .iter()
                .map(|p| build_recipe(cfg, p, scenario_space).map(|(pl, _)| pl))
                .collect::<Result<Vec<_>>>()?;
            Ok((combine_cover_planners(&built)?, None))
        }
        RecipeConfig::ToLoop { inner } => {
            let (pl, _) = build_recipe(cfg, inner, scenario_space)?;
            Ok((pl.to_loop()?, None))
        }
        RecipeConfig::CatRoundTrip { inner } => {
            let (pl, _) = build_recipe(cfg, inner, scenario_space)?;
            let witness = planner_to_cat_cover(&pl)?;
            let rebuilt = cat_cover_to_planner(&witness)?;
            Ok((rebuilt, Some(witness)))
        }
        RecipeConfig::BasedLoopFromCat { inner } => {
            let (pl, _) = build_recipe(cfg, inner, scenario_space)?;
            let witness = planner_to_cat_cover(&pl)?;
            let rebuilt = based_loop_planner_from_cat(&witness)?;
            Ok((rebuilt, Some(witness)))
        }
        RecipeConfig::Corrupt { inner, corruption } => {
            let (pl, _) = build_recipe(cfg, inner, scenario_space)?;
            Ok((corrupt_planner(&pl, *corruption)?, None))
        }
    }
}

fn builtin_planner(name: &str, scenario_space: &Space) -> Result<Planner> {
    match name {
        "circle" => circle_planner(),
        "circle-off-antipodal" => circle_off_antipodal_planner(),
        "circle-off-diagonal" => circle_off_diagonal_planner(),
        "diagonal" => diagonal_planner(scenario_space),
        "sphere-antipodal-1" => sphere_antipodal_planner(1),
        "sphere-antipodal-2" => sphere_antipodal_planner(2),
        "sphere-antipodal-3" => sphere_antipodal_planner(3),
        "seam-discontinuity" => seam_discontinuity_planner(),
        other => Err(Error::Config(format!(
            "unknown builtin planner `{other}`; registered: {BUILTIN_PLANNERS:?}"
        ))),
    }
}

fn build_map(cfg: &MapConfig, space: &Space) -> Result<MapSpec> {
    match cfg {
        MapConfig::Identity => Ok(MapSpec::identity(space)),
        MapConfig::Constant { base } => {
            let p = space.point(base.clone())?;
            MapSpec::constant(space, p)
        }
        MapConfig::QuotientProjection { quotient } => {
            let q = Space::by_name(quotient)?;
            MapSpec::quotient_projection(space, &q)
        }
    }
}

fn named_domain(cfg: &ScenarioConfig, name: &str, on: &Space) -> Result<FiberedDomain> {
    match name {
        "fiber-product" => fiber_product_domain(cfg, on),
        "near-diagonal-band" => {
            let s = on.clone();
            Ok(FiberedDomain::custom(
                format!("band({})", on.id()),
                on,
                move |x: &Point, y: &Point| s.dist_coords(x.coords(), y.coords()) < BAND_HALF_WIDTH,
                PairSampler::Rejection {
                    budget: REJECTION_BUDGET,
                },
            ))
        }
        other => Err(Error::Config(format!(
            "unknown domain `{other}`; registered: {NAMED_DOMAINS:?}"
        ))),
    }
}

/// The fibered product of the scenario's `f` and `g`, with a structured
/// sampler chosen from their shapes: base slices for (identity, constant),
/// the diagonal for (identity, identity), and diagonal-plus-orbit-graphs for
/// a pair of equal quotient projections.
fn fiber_product_domain(cfg: &ScenarioConfig, on: &Space) -> Result<FiberedDomain> {
    let (Some(f_cfg), Some(g_cfg)) = (&cfg.f, &cfg.g) else {
        return Err(Error::Config(
            "the fiber-product domain needs scenario-level `f` and `g` maps".into(),
        ));
    };
    match (f_cfg, g_cfg) {
        (MapConfig::Identity, MapConfig::Constant { base }) => {
            let p = on.point(base.clone())?;
            base_slice_domain(on, &p)
        }
        (MapConfig::Identity, MapConfig::Identity) => {
            let id = MapSpec::identity(on);
            FiberedDomain::fibered(
                format!("diagonal({})", on.id()),
                id.clone(),
                id,
                FIBER_TOL,
                PairSampler::Diagonal,
            )
        }
        (
            MapConfig::QuotientProjection { quotient: qf },
            MapConfig::QuotientProjection { quotient: qg },
        ) if qf == qg => {
            let quotient = Space::by_name(qf)?;
            let proj = MapSpec::quotient_projection(on, &quotient)?;
            let orbit = quotient
                .orbit()
                .ok_or_else(|| Error::Config(format!("`{}` has no orbit data", quotient.id())))?;
            let mut branches = vec![PairSampler::Diagonal];
            for om in orbit.iter().filter(|om| om.label() != "id") {
                let s = on.clone();
                let om = om.clone();
                branches.push(PairSampler::Graph {
                    label: om.label().to_string(),
                    map: Arc::new(move |p: &Point| s.point_unchecked(om.apply(p.coords()))),
                });
            }
            FiberedDomain::fibered(
                format!("fiber-product({})", quotient.id()),
                proj.clone(),
                proj,
                FIBER_TOL,
                PairSampler::Union(branches),
            )
        }
        (f, g) => {
            // Build anyway when a structured sampler is unnecessary?  No: a
            // fibered domain without one cannot be sampled reliably, so the
            // combination is rejected up front.
            let _ = (build_map(f, on)?, build_map(g, on)?);
            Err(Error::Config(
                "no structured sampler for this f/g combination; supported: \
                 (identity, constant), (identity, identity), equal quotient projections"
                    .into(),
            ))
        }
    }
}

fn named_iso(name: &str, on: &Space) -> Result<(MapSpec, MapSpec)> {
    match name {
        "rotate-quarter" => {
            let circle = Space::circle();
            if !on.same_as(&circle) {
                return Err(Error::SpaceMismatch {
                    expected: circle.id().to_string(),
                    actual: on.id().to_string(),
                });
            }
            let s = circle.clone();
            let phi = MapSpec::custom("rotate-quarter", &circle, &circle, move |p: &Point| {
                let c = p.coords();
                s.point_unchecked(vec![-c[1], c[0]])
            });
            let s = circle.clone();
            let phi_inv =
                MapSpec::custom("rotate-back-quarter", &circle, &circle, move |p: &Point| {
                    let c = p.coords();
                    s.point_unchecked(vec![c[1], -c[0]])
                });
            Ok((phi, phi_inv))
        }
        "swap-factors" => {
            let Some([a, b]) = on.factors() else {
                return Err(Error::Config(format!(
                    "swap-factors needs a two-factor product space, got `{}`",
                    on.id()
                )));
            };
            if !a.same_as(b) {
                return Err(Error::Config(format!(
                    "swap-factors needs equal factors, got `{}` and `{}`",
                    a.id(),
                    b.id()
                )));
            }
            let split = a.ambient_dim();
            let s = on.clone();
            let swap = move |p: &Point| {
                let c = p.coords();
                let mut out = c[split..].to_vec();
                out.extend_from_slice(&c[..split]);
                s.point_unchecked(out)
            };
            let phi = MapSpec::custom("swap-factors", on, on, swap.clone());
            let phi_inv = MapSpec::custom("swap-factors-back", on, on, swap);
            Ok((phi, phi_inv))
        }
        other => Err(Error::Config(format!(
            "unknown isomorphism `{other}`; registered: {NAMED_ISOS:?}"
        ))),
    }
}

/// The inclusion `S^1 -> S^1 x [0,1]` at height zero, the projection back,
/// and the straight-line homotopy between their composite and the identity.
fn cylinder_equivalence() -> (MapSpec, MapSpec, HomotopySpec) {
    let cyl = Space::cylinder();
    let circle = Space::circle();
    let s = circle.clone();
    let project = MapSpec::custom("project-to-circle", &cyl, &circle, move |p: &Point| {
        s.point_unchecked(p.coords()[..2].to_vec())
    });
    let c = cyl.clone();
    let include = MapSpec::custom("include-at-height-0", &circle, &cyl, move |p: &Point| {
        c.point_unchecked(vec![p.coords()[0], p.coords()[1], 0.0])
    });
    let squash = MapSpec::compose(&include, &project).expect("composable");
    let c = cyl.clone();
    let raise = HomotopySpec::new(
        "raise-to-height",
        &cyl,
        squash,
        MapSpec::identity(&cyl),
        move |p: &Point, t: f64| {
            let co = p.coords();
            c.point_unchecked(vec![co[0], co[1], t * co[2]])
        },
    );
    (project, include, raise)
}

fn named_equivalence(name: &str) -> Result<(MapSpec, MapSpec, HomotopySpec, HomotopySpec)> {
    let (project, include, raise) = cylinder_equivalence();
    match name {
        "circle-to-cylinder" => {
            let h_back = HomotopySpec::stationary_identity(&Space::circle());
            Ok((include, project, raise, h_back))
        }
        "cylinder-to-circle" => {
            let h = HomotopySpec::stationary_identity(&Space::circle());
            Ok((project, include, h, raise.reversed()))
        }
        other => Err(Error::Config(format!(
            "unknown equivalence `{other}`; registered: {NAMED_EQUIVALENCES:?}"
        ))),
    }
}

/// The near-diagonal band on the circle together with the homotopy that
/// slides the second endpoint along the shorter arc onto the first.
fn named_domination(name: &str, on: &Space) -> Result<(FiberedDomain, HomotopySpec)> {
    match name {
        "retract-band-to-diagonal" => {
            let circle = Space::circle();
            if !on.same_as(&circle) {
                return Err(Error::SpaceMismatch {
                    expected: circle.id().to_string(),
                    actual: on.id().to_string(),
                });
            }
            let s = circle.clone();
            let band = FiberedDomain::custom(
                "band(S1)",
                &circle,
                move |x: &Point, y: &Point| s.dist_coords(x.coords(), y.coords()) < BAND_HALF_WIDTH,
                PairSampler::Rejection {
                    budget: REJECTION_BUDGET,
                },
            );
            let pairs = pair_space(&circle);
            let ps = pairs.clone();
            let retract = MapSpec::custom("retract-to-diagonal", &pairs, &pairs, {
                let ps = pairs.clone();
                move |p: &Point| {
                    let c = p.coords();
                    ps.point_unchecked(vec![c[0], c[1], c[0], c[1]])
                }
            });
            let slide = HomotopySpec::new(
                "slide-y-to-x",
                &pairs,
                MapSpec::identity(&pairs),
                retract,
                move |p: &Point, t: f64| {
                    let c = p.coords();
                    let ang = crate::planner::builtins::signed_angle(&c[..2], &c[2..]);
                    let a = (1.0 - t) * ang;
                    let (sn, co) = a.sin_cos();
                    ps.point_unchecked(vec![
                        c[0],
                        c[1],
                        c[0] * co - c[1] * sn,
                        c[0] * sn + c[1] * co,
                    ])
                },
            );
            Ok((band, slide))
        }
        other => Err(Error::Config(format!(
            "unknown domination setup `{other}`; registered: {NAMED_DOMINATIONS:?}"
        ))),
    }
}

/// Command-line overrides applied on top of a scenario file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    /// Report destination; defaults to `<name>-report.json` in the working
    /// directory.
    pub report_path: Option<PathBuf>,
    /// Directory for export files; defaults to the working directory.
    pub export_dir: Option<PathBuf>,
}

/// The written outcome of a scenario run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected_piece_count: Option<usize>,
    /// True when no expectation is set or the built planner matches it.
    pub count_ok: bool,
    pub verification: VerificationReport,
}

impl ScenarioReport {
    /// The run's exit-status contract: all checks passed and the piece count
    /// matched the expectation (when one was set).
    pub fn passed(&self) -> bool {
        self.count_ok && self.verification.overall_pass
    }

    /// Pretty JSON with a trailing newline, stable across runs.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Paths written by [`run_scenario`].
#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    pub report_path: PathBuf,
    pub export_paths: Vec<PathBuf>,
}

/// Build the scenario's planner, verify it, write the report (also on check
/// failure), and write any requested exports.
pub fn run_scenario(cfg: &ScenarioConfig, overrides: &Overrides) -> Result<ScenarioOutcome> {
    let (planner, witness) = build_scenario(cfg)?;

    let mut vcfg = cfg.verification.clone();
    if let Some(seed) = overrides.seed {
        vcfg.seed = seed;
    }
    if let Some(n) = overrides.samples {
        vcfg.n_samples = n;
    }

    let verification = verify_planner(&planner, witness.as_ref(), &vcfg)?;
    let count_ok = cfg
        .expected_piece_count
        .is_none_or(|want| want == planner.piece_count());
    let report = ScenarioReport {
        scenario: cfg.name.clone(),
        expected_piece_count: cfg.expected_piece_count,
        count_ok,
        verification,
    };

    let report_path = overrides
        .report_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}-report.json", cfg.name)));
    fs::write(&report_path, report.to_json()?)?;

    let export_dir = overrides
        .export_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    let mut export_paths = Vec::new();
    for req in &cfg.exports {
        let space = planner.space();
        let pairs = req
            .pairs
            .iter()
            .map(|p| Ok((space.point(p.x.clone())?, space.point(p.y.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        let out = export_dir.join(&req.file);
        export_path_samples(&planner, &pairs, req.samples, &out)?;
        export_paths.push(out);
    }

    Ok(ScenarioOutcome {
        report,
        report_path,
        export_paths,
    })
}

enum ExportFormat {
    JsonLines,
    Columnar,
}

fn export_format(path: &Path) -> Result<ExportFormat> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") => Ok(ExportFormat::JsonLines),
        Some("tsv") => Ok(ExportFormat::Columnar),
        other => Err(Error::Config(format!(
            "export files must end in .jsonl or .tsv, got {other:?}"
        ))),
    }
}

#[derive(Serialize)]
struct ExportHeader<'a> {
    space: &'a str,
    mode: &'a str,
    pairs: usize,
    samples_per_pair: usize,
}

#[derive(Serialize)]
struct ExportRecord<'a> {
    pair: usize,
    piece: &'a str,
    subpart: &'a str,
    t: f64,
    coords: &'a [f64],
}

/// Evaluation grid for one exported path: `samples` evenly spaced points
/// including both endpoints, with `t = 1/2` spliced in for loop-mode
/// planners when the grid misses it (the loop contract pins that instant).
fn export_grid(samples: usize, is_loop: bool) -> Vec<f64> {
    let mut ts: Vec<f64> = (0..samples)
        .map(|j| j as f64 / (samples - 1) as f64)
        .collect();
    if is_loop && !ts.contains(&0.5) {
        let at = ts.partition_point(|&t| t < 0.5);
        ts.insert(at, 0.5);
    }
    ts
}

/// Write one polyline record per (pair, grid instant) to `out`; the file
/// extension selects JSON lines or tab-separated columns.  Pairs must be
/// domain members.
pub fn export_path_samples(
    planner: &Planner,
    pairs: &[(Point, Point)],
    samples: usize,
    out: &Path,
) -> Result<()> {
    if samples < 2 {
        return Err(Error::Config(
            "path export needs at least 2 samples (both endpoints)".into(),
        ));
    }
    let format = export_format(out)?;
    let space = planner.space();
    let is_loop = planner.mode().is_loop();
    let ts = export_grid(samples, is_loop);

    let mut file = fs::File::create(out)?;
    match format {
        ExportFormat::JsonLines => {
            let header = ExportHeader {
                space: space.id(),
                mode: planner.mode().name(),
                pairs: pairs.len(),
                samples_per_pair: samples,
            };
            writeln!(file, "{}", serde_json::to_string(&header)?)?;
            for (i, (x, y)) in pairs.iter().enumerate() {
                let (path, piece_idx, subpart_idx) = planner.evaluate(x, y)?;
                let piece = &planner.pieces()[piece_idx];
                for &t in &ts {
                    let p = path.eval(t)?;
                    let record = ExportRecord {
                        pair: i,
                        piece: piece.label(),
                        subpart: piece.subparts()[subpart_idx].label(),
                        t,
                        coords: p.coords(),
                    };
                    writeln!(file, "{}", serde_json::to_string(&record)?)?;
                }
            }
        }
        ExportFormat::Columnar => {
            writeln!(file, "# space {}", space.id())?;
            writeln!(file, "# mode {}", planner.mode().name())?;
            let cols: Vec<String> = (0..space.ambient_dim()).map(|k| format!("c{k}")).collect();
            writeln!(file, "# columns pair piece subpart t {}", cols.join(" "))?;
            for (i, (x, y)) in pairs.iter().enumerate() {
                let (path, piece_idx, subpart_idx) = planner.evaluate(x, y)?;
                let piece = &planner.pieces()[piece_idx];
                for &t in &ts {
                    let p = path.eval(t)?;
                    let coords: Vec<String> = p.coords().iter().map(|v| format!("{v}")).collect();
                    writeln!(
                        file,
                        "{}\t{}\t{}\t{}\t{}",
                        i,
                        piece.label(),
                        piece.subparts()[subpart_idx].label(),
                        t,
                        coords.join("\t")
                    )?;
                }
            }
        }
    }
    Ok(())
}
