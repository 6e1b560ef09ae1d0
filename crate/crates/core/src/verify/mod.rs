//! Sampling-based certification of planner contracts.
//!
//! [`verify_planner`] draws a seeded set of domain members and folds them
//! through up to seven checks: partition discipline, section endpoint
//! contract, in-space confinement of path samples, fibered membership,
//! a continuity modulus bound, the loop contract (loop modes only), and the
//! cover/contraction contract of an attached category witness.  Checks that
//! need section evaluation are skipped when the partition check fails, since
//! there is no unique section to evaluate.
//!
//! Verification is deterministic: the sample set depends only on the domain
//! and the seed, and per-member randomness (continuity probes) comes from a
//! stream derived from the member's index.  Splitting the samples across
//! workers therefore merges to byte-identical reports for any worker count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{derive_seed, seeded_rng, Point};
use crate::planner::{CatWitness, Planner, PlannerMode};

/// Stream tags for derived per-index randomness.
const TAG_PERTURB: u64 = 1;
const TAG_CAT_SAMPLE: u64 = 2;
const TAG_CAT_PERTURB: u64 = 3;

/// Tunables for one verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct VerificationConfig {
    /// Root seed for domain sampling and probe perturbations.
    pub seed: u64,
    /// Domain members to draw.
    pub n_samples: usize,
    /// Evaluation grid points per path (including both endpoints).
    pub n_path_samples: usize,
    /// Intrinsic scale of continuity probes.
    pub delta: f64,
    /// Modulus bound `L`: paths of members at distance `delta` must stay
    /// within `L * delta + eps_space` of each other.
    pub modulus_bound: f64,
    /// Tolerance for endpoint, in-space, and loop equalities.
    pub eps_space: f64,
    /// Tolerance for gluing concatenated paths; construction-time checks use
    /// it, and it is carried here so a report pins down every tolerance.
    pub eps_glue: f64,
    /// Tolerance for fibered-membership deviations.
    pub fiber_tol: f64,
    /// Worker threads for the sample fold.
    pub workers: usize,
}

impl Default for VerificationConfig {
    fn default() -> VerificationConfig {
        VerificationConfig {
            seed: 7,
            n_samples: 10_000,
            n_path_samples: 64,
            delta: 1e-3,
            modulus_bound: 8.0,
            eps_space: 1e-9,
            eps_glue: 1e-9,
            fiber_tol: 1e-9,
            workers: 1,
        }
    }
}

impl VerificationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be at least 1".into()));
        }
        if self.n_path_samples < 2 {
            return Err(Error::Config(
                "n_path_samples must be at least 2 (the grid includes both endpoints)".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("modulus_bound", self.modulus_bound),
            ("eps_space", self.eps_space),
            ("eps_glue", self.eps_glue),
            ("fiber_tol", self.fiber_tol),
        ] {
            if v <= 0.0 || v.is_nan() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Outcome of one check slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// The input that witnessed the worst (or first fatal) violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

/// One check slot of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    /// Worst observed violation magnitude (deviation, excess claim count, or
    /// modulus ratio, depending on the check); 0 when nothing was observed.
    pub worst: f64,
    /// How many probes this check actually evaluated.
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckResult {
    fn skipped(name: &str, note: &str) -> CheckResult {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Skipped,
            worst: 0.0,
            samples: 0,
            witness: None,
            note: Some(note.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Full verification outcome for one planner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub space: String,
    pub domain: String,
    pub mode: String,
    pub provenance: String,
    pub piece_count: usize,
    pub overall_pass: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    /// Look a check up by slot name.
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pretty JSON with a trailing newline, stable across runs.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Per-check fold state.  Merging is associative and order-insensitive for
/// `worst`/`evaluated`, and keeps the smallest sample index for the failure
/// witness, so chunked folds reproduce the sequential result exactly.
#[derive(Clone)]
struct Acc {
    evaluated: usize,
    worst: f64,
    fail: Option<(usize, Witness)>,
}

impl Acc {
    fn new() -> Acc {
        Acc {
            evaluated: 0,
            worst: 0.0,
            fail: None,
        }
    }

    fn observe(&mut self, dev: f64) {
        if dev > self.worst {
            self.worst = dev;
        }
    }

    fn fail_at(&mut self, index: usize, witness: Witness) {
        match &self.fail {
            Some((held, _)) if *held <= index => {}
            _ => self.fail = Some((index, witness)),
        }
    }

    fn merge(&mut self, other: Acc) {
        self.evaluated += other.evaluated;
        self.observe(other.worst);
        if let Some((index, witness)) = other.fail {
            self.fail_at(index, witness);
        }
    }

    fn into_result(self, name: &str) -> CheckResult {
        let (status, witness) = match self.fail {
            Some((_, w)) => (CheckStatus::Fail, Some(w)),
            None => (CheckStatus::Pass, None),
        };
        CheckResult {
            name: name.into(),
            status,
            worst: self.worst,
            samples: self.evaluated,
            witness,
            note: None,
        }
    }
}

/// Fold state of one worker chunk.
#[derive(Clone)]
struct ChunkAcc {
    partition: Acc,
    section: Acc,
    in_space: Acc,
    fibered: Acc,
    continuity: Acc,
    loop_contract: Acc,
}

impl ChunkAcc {
    fn new() -> ChunkAcc {
        ChunkAcc {
            partition: Acc::new(),
            section: Acc::new(),
            in_space: Acc::new(),
            fibered: Acc::new(),
            continuity: Acc::new(),
            loop_contract: Acc::new(),
        }
    }

    fn merge(&mut self, other: ChunkAcc) {
        self.partition.merge(other.partition);
        self.section.merge(other.section);
        self.in_space.merge(other.in_space);
        self.fibered.merge(other.fibered);
        self.continuity.merge(other.continuity);
        self.loop_contract.merge(other.loop_contract);
    }
}

fn witness_of(x: &Point, y: &Point, t: Option<f64>, detail: Option<String>) -> Witness {
    Witness {
        x: x.coords().to_vec(),
        y: y.coords().to_vec(),
        t,
        detail,
    }
}

fn grid(m: usize) -> impl Iterator<Item = f64> {
    let last = (m - 1) as f64;
    (0..m).map(move |j| j as f64 / last)
}

/// One member's contribution to every per-sample check.
fn fold_member(
    pl: &Planner,
    cfg: &VerificationConfig,
    index: usize,
    pair: &(Point, Point),
    acc: &mut ChunkAcc,
) {
    let (x, y) = pair;
    let space = pl.space();

    // Partition discipline: exactly one piece, exactly one subpart.
    acc.partition.evaluated += 1;
    let piece_index = match pl.piece_index_of(x, y) {
        Ok(i) => i,
        Err(err) => {
            let excess = match &err {
                Error::PartitionViolation { count, .. } => (*count as f64 - 1.0).abs(),
                _ => 1.0,
            };
            acc.partition.observe(excess);
            acc.partition
                .fail_at(index, witness_of(x, y, None, Some(err.to_string())));
            return;
        }
    };
    let piece = &pl.pieces()[piece_index];
    let subpart_index = match piece.subpart_of(x, y) {
        Ok(i) => i,
        Err(err) => {
            let excess = match &err {
                Error::SubpartViolation { count, .. } => (*count as f64 - 1.0).abs(),
                _ => 1.0,
            };
            acc.partition.observe(excess);
            acc.partition
                .fail_at(index, witness_of(x, y, None, Some(err.to_string())));
            return;
        }
    };

    // Section evaluation and the endpoint contract.
    acc.section.evaluated += 1;
    let path = match piece.section(x, y) {
        Ok(p) => p,
        Err(err) => {
            acc.section.observe(1.0);
            acc.section
                .fail_at(index, witness_of(x, y, None, Some(err.to_string())));
            return;
        }
    };
    // In loop modes the section returns to its start; `y` is visited at the
    // midpoint instead, which the loop-contract check certifies.
    let expected_end = if pl.mode().is_loop() { x } else { y };
    let d0 = space.dist_coords(path.at(0.0).coords(), x.coords());
    let d1 = space.dist_coords(path.at(1.0).coords(), expected_end.coords());
    acc.section.observe(d0.max(d1));
    if d0 > cfg.eps_space {
        acc.section.fail_at(
            index,
            witness_of(x, y, Some(0.0), Some(format!("start deviates by {d0:.6e}"))),
        );
    } else if d1 > cfg.eps_space {
        acc.section.fail_at(
            index,
            witness_of(x, y, Some(1.0), Some(format!("end deviates by {d1:.6e}"))),
        );
    }

    // Path samples stay on the space.
    acc.in_space.evaluated += 1;
    for t in grid(cfg.n_path_samples) {
        let violation = space.membership_violation(path.at(t).coords());
        acc.in_space.observe(violation);
        if violation > cfg.eps_space {
            acc.in_space.fail_at(
                index,
                witness_of(x, y, Some(t), Some(format!("off-space by {violation:.6e}"))),
            );
            break;
        }
    }

    // Fibered membership re-verified (or plain membership for custom domains).
    acc.fibered.evaluated += 1;
    match pl.domain().fiber_deviation(x, y) {
        Some(dev) => {
            acc.fibered.observe(dev);
            if dev > cfg.fiber_tol {
                acc.fibered.fail_at(
                    index,
                    witness_of(x, y, None, Some(format!("fiber deviation {dev:.6e}"))),
                );
            }
        }
        None => {
            if !pl.domain().contains(x, y) {
                acc.fibered.observe(1.0);
                acc.fibered.fail_at(
                    index,
                    witness_of(x, y, None, Some("membership re-check failed".into())),
                );
            }
        }
    }

    // Loop contract at t in {0, 1/2, 1}.
    if pl.mode().is_loop() {
        acc.loop_contract.evaluated += 1;
        let pin = match pl.mode() {
            PlannerMode::BasedLoop { base } => base,
            _ => x,
        };
        let at0 = space.dist_coords(path.at(0.0).coords(), pin.coords());
        let at1 = space.dist_coords(path.at(1.0).coords(), pin.coords());
        let mid = space.dist_coords(path.at(0.5).coords(), y.coords());
        let dev = at0.max(at1).max(mid);
        acc.loop_contract.observe(dev);
        if dev > cfg.eps_space {
            let (t, what) = if mid >= at0.max(at1) {
                (0.5, format!("misses y by {mid:.6e}"))
            } else if at1 >= at0 {
                (1.0, format!("misses the base point by {at1:.6e}"))
            } else {
                (0.0, format!("misses the base point by {at0:.6e}"))
            };
            acc.loop_contract
                .fail_at(index, witness_of(x, y, Some(t), Some(what)));
        }
    }

    // Continuity modulus against a perturbed partner in the same piece and
    // subpart.
    let mut rng = seeded_rng(derive_seed(cfg.seed, TAG_PERTURB, index as u64));
    if let Some(partner) = pl.domain().perturb_member(pair, cfg.delta, &mut rng) {
        let same_cell = matches!(
            pl.piece_index_of(&partner.0, &partner.1), Ok(i) if i == piece_index
        ) && matches!(
            piece.subpart_of(&partner.0, &partner.1), Ok(i) if i == subpart_index
        );
        if same_cell {
            if let Ok(other) = piece.section(&partner.0, &partner.1) {
                acc.continuity.evaluated += 1;
                let mut sup = 0.0_f64;
                let mut sup_t = 0.0_f64;
                for t in grid(cfg.n_path_samples) {
                    let d = space.dist_coords(path.at(t).coords(), other.at(t).coords());
                    if d > sup {
                        sup = d;
                        sup_t = t;
                    }
                }
                acc.continuity.observe(sup / cfg.delta);
                if sup > cfg.modulus_bound * cfg.delta + cfg.eps_space {
                    acc.continuity.fail_at(
                        index,
                        witness_of(
                            x,
                            y,
                            Some(sup_t),
                            Some(format!(
                                "paths diverge by {sup:.6e} for a {:.6e} perturbation",
                                cfg.delta
                            )),
                        ),
                    );
                }
            }
        }
    }
}

fn fold_chunk(
    pl: &Planner,
    cfg: &VerificationConfig,
    offset: usize,
    pairs: &[(Point, Point)],
) -> ChunkAcc {
    let mut acc = ChunkAcc::new();
    for (k, pair) in pairs.iter().enumerate() {
        fold_member(pl, cfg, offset + k, pair, &mut acc);
    }
    acc
}

/// Certify a planner, optionally together with a category witness.
///
/// The report always carries all seven check slots in a fixed order; checks
/// that do not apply (loop contract for path planners, the witness slot when
/// no witness is given) are marked skipped, and section-dependent checks are
/// skipped when the partition check fails.
pub fn verify_planner(
    pl: &Planner,
    witness: Option<&CatWitness>,
    cfg: &VerificationConfig,
) -> Result<VerificationReport> {
    cfg.validate()?;
    let samples = pl.domain().sample_pairs(cfg.n_samples, cfg.seed)?;

    let total = if cfg.workers <= 1 || samples.len() < 2 {
        fold_chunk(pl, cfg, 0, &samples)
    } else {
        let workers = cfg.workers.min(samples.len());
        let chunk = samples.len().div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = samples
                .chunks(chunk)
                .enumerate()
                .map(|(w, part)| {
                    let pl = &*pl;
                    let cfg = &*cfg;
                    scope.spawn(move || fold_chunk(pl, cfg, w * chunk, part))
                })
                .collect();
            let mut total = ChunkAcc::new();
            for handle in handles {
                total.merge(handle.join().expect("verification worker panicked"));
            }
            total
        })
    };

    let partition_failed = total.partition.fail.is_some();
    let mut checks = Vec::with_capacity(7);
    checks.push(total.partition.into_result("partition"));
    if partition_failed {
        for name in [
            "section_contract",
            "in_space",
            "fibered_membership",
            "continuity_modulus",
        ] {
            checks.push(CheckResult::skipped(name, "skipped: prerequisite failed"));
        }
        checks.push(if pl.mode().is_loop() {
            CheckResult::skipped("loop_contract", "skipped: prerequisite failed")
        } else {
            CheckResult::skipped("loop_contract", "not applicable in path mode")
        });
    } else {
        checks.push(total.section.into_result("section_contract"));
        checks.push(total.in_space.into_result("in_space"));
        checks.push(total.fibered.into_result("fibered_membership"));
        checks.push(total.continuity.into_result("continuity_modulus"));
        checks.push(if pl.mode().is_loop() {
            total.loop_contract.into_result("loop_contract")
        } else {
            CheckResult::skipped("loop_contract", "not applicable in path mode")
        });
    }
    checks.push(match witness {
        Some(w) => check_cat_witness(w, cfg),
        None => CheckResult::skipped("cat_witness", "not applicable: no witness attached"),
    });

    let overall_pass = checks.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(VerificationReport {
        space: pl.space().id().to_string(),
        domain: pl.domain().label().to_string(),
        mode: pl.mode().name().to_string(),
        provenance: pl.provenance().to_string(),
        piece_count: pl.piece_count(),
        overall_pass,
        checks,
    })
}

/// Certify a category witness on its own: sampled cover completeness, the
/// contraction endpoint contract, and a continuity modulus for each
/// contraction within its cover set.
pub fn check_cat_witness(w: &CatWitness, cfg: &VerificationConfig) -> CheckResult {
    let space = w.space();
    let base = w.base();
    let mut acc = Acc::new();
    let sample_seed = derive_seed(cfg.seed, TAG_CAT_SAMPLE, 0);
    for index in 0..cfg.n_samples {
        let y = space.sample_at(sample_seed, index);
        acc.evaluated += 1;
        let Some(entry_index) = w.entries().iter().position(|e| e.covers(&y)) else {
            acc.observe(1.0);
            acc.fail_at(
                index,
                witness_of(base, &y, None, Some("no cover set contains y".into())),
            );
            continue;
        };
        let entry = &w.entries()[entry_index];

        let d0 = space.dist_coords(entry.eval(&y, 0.0).coords(), base.coords());
        let d1 = space.dist_coords(entry.eval(&y, 1.0).coords(), y.coords());
        acc.observe(d0.max(d1));
        if d0 > cfg.eps_space || d1 > cfg.eps_space {
            let (t, dev) = if d0 >= d1 { (0.0, d0) } else { (1.0, d1) };
            acc.fail_at(
                index,
                witness_of(
                    base,
                    &y,
                    Some(t),
                    Some(format!(
                        "entry `{}` endpoint deviates by {dev:.6e}",
                        entry.label()
                    )),
                ),
            );
            continue;
        }

        let mut rng = seeded_rng(derive_seed(cfg.seed, TAG_CAT_PERTURB, index as u64));
        let stepped = space.tangent_step(y.coords(), cfg.delta, &mut rng);
        let partner = space.point_unchecked(space.canonicalize(&stepped));
        let same_set = w.entries().iter().position(|e| e.covers(&partner)) == Some(entry_index);
        if same_set {
            let mut sup = 0.0_f64;
            for t in grid(cfg.n_path_samples) {
                let d =
                    space.dist_coords(entry.eval(&y, t).coords(), entry.eval(&partner, t).coords());
                sup = sup.max(d);
            }
            if sup > cfg.modulus_bound * cfg.delta + cfg.eps_space {
                acc.fail_at(
                    index,
                    witness_of(
                        base,
                        &y,
                        None,
                        Some(format!(
                            "entry `{}` contraction moves {sup:.6e} for a {:.6e} step",
                            entry.label(),
                            cfg.delta
                        )),
                    ),
                );
            }
        }
    }
    let mut result = acc.into_result("cat_witness");
    result.note = Some(format!("{} entries", w.entry_count()));
    result
}
