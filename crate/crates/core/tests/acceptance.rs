//! Acceptance suite: ten end-to-end criteria over the shipped scenario
//! files and the library API.  Each test prints one `acceptance NN ...:
//! PASS|FAIL` line (visible with `--nocapture`) and then asserts.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use fiberplan::planner::{
    base_slice_domain, cat_cover_to_planner, circle_off_antipodal_planner,
    circle_off_diagonal_planner, circle_planner, combine_cover_planners, diagonal_planner,
    planner_to_cat_cover, product_planner, sphere_antipodal_planner, Planner,
};
use fiberplan::scenario::{run_scenario, Overrides, ScenarioConfig, ScenarioReport};
use fiberplan::verify::{verify_planner, CheckStatus, VerificationConfig};

/// Endpoint/loop equality tolerance asserted on reports.
const ENDPOINT_TOL: f64 = 1e-9;
/// Sample budget the runtime criteria are measured at.
const FULL_SAMPLES: usize = 10_000;
/// Wall-clock budget for one full-sample sphere verification.
const SPHERE_RUNTIME_BUDGET: Duration = Duration::from_secs(10);

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run_scenario_file(name: &str, dir: &Path) -> ScenarioReport {
    let cfg = ScenarioConfig::load(&scenario_dir().join(format!("{name}.json")))
        .unwrap_or_else(|e| panic!("loading scenario {name}: {e}"));
    let overrides = Overrides {
        report_path: Some(dir.join(format!("{name}-report.json"))),
        export_dir: Some(dir.to_path_buf()),
        ..Overrides::default()
    };
    run_scenario(&cfg, &overrides)
        .unwrap_or_else(|e| panic!("running scenario {name}: {e}"))
        .report
}

fn announce(number: usize, label: &str, pass: bool) {
    println!(
        "acceptance {number:02} {label}: {}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn worst_of(report: &ScenarioReport, check: &str) -> f64 {
    report.verification.check(check).expect(check).worst
}

#[test]
fn c01_sphere_odd_quotients_use_one_piece() {
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    for name in ["sphere-odd-1", "sphere-odd-3"] {
        let start = Instant::now();
        let report = run_scenario_file(name, dir.path());
        let elapsed = start.elapsed();
        pass &= report.passed()
            && report.verification.piece_count == 1
            && worst_of(&report, "section_contract") <= ENDPOINT_TOL
            && report.verification.check("partition").unwrap().samples == FULL_SAMPLES
            && elapsed < SPHERE_RUNTIME_BUDGET;
    }
    announce(1, "sphere antipodal domains, odd case (1 piece)", pass);
    assert!(pass);
}

#[test]
fn c02_sphere_even_quotient_uses_two_pieces() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let report = run_scenario_file("sphere-even-2", dir.path());
    let elapsed = start.elapsed();
    let pass = report.passed()
        && report.verification.piece_count == 2
        && worst_of(&report, "section_contract") <= ENDPOINT_TOL
        && report.verification.check("partition").unwrap().samples == FULL_SAMPLES
        && elapsed < SPHERE_RUNTIME_BUDGET;
    announce(2, "sphere antipodal domain, even case (2 pieces)", pass);
    assert!(pass);
}

#[test]
fn c03_torus_product_and_klein_restriction() {
    let dir = tempfile::tempdir().unwrap();
    let torus = run_scenario_file("torus-product", dir.path());
    let klein = run_scenario_file("klein-quotient", dir.path());
    let pass = torus.passed()
        && torus.verification.piece_count == 3
        && klein.passed()
        && klein.verification.piece_count <= 3;
    announce(
        3,
        "torus product (3 pieces) and Klein restriction (<= 3)",
        pass,
    );
    assert!(pass, "torus {torus:#?}\nklein {klein:#?}");
}

#[test]
fn c04_fhe_transport_both_directions() {
    let dir = tempfile::tempdir().unwrap();
    let there = run_scenario_file("fhe-cylinder", dir.path());
    let back = run_scenario_file("fhe-cylinder-back", dir.path());
    let pass = there.passed()
        && there.verification.piece_count == 2
        && worst_of(&there, "section_contract") <= ENDPOINT_TOL
        && back.passed()
        && back.verification.piece_count == 2
        && worst_of(&back, "section_contract") <= ENDPOINT_TOL;
    announce(
        4,
        "homotopy-equivalence transport to the cylinder and back",
        pass,
    );
    assert!(pass, "there {there:#?}\nback {back:#?}");
}

#[test]
fn c05_isomorphism_transport_preserves_counts() {
    let dir = tempfile::tempdir().unwrap();
    let rotated = run_scenario_file("iso-rotate-circle", dir.path());
    let swapped = run_scenario_file("iso-swap-torus", dir.path());
    let circle_count = circle_planner().unwrap().piece_count();
    let torus_count = {
        let c = circle_planner().unwrap();
        product_planner(&c, &c, &fiberplan::geometry::Space::torus2())
            .unwrap()
            .piece_count()
    };
    let pass = rotated.passed()
        && rotated.verification.piece_count == circle_count
        && swapped.passed()
        && swapped.verification.piece_count == torus_count;
    announce(5, "bundle-isomorphism transport keeps piece counts", pass);
    assert!(pass, "rotated {rotated:#?}\nswapped {swapped:#?}");
}

#[test]
fn c06_loop_conversion_preserves_counts_and_contract() {
    let suite: Vec<(&str, Planner)> = vec![
        ("circle", circle_planner().unwrap()),
        (
            "circle-off-antipodal",
            circle_off_antipodal_planner().unwrap(),
        ),
        (
            "circle-off-diagonal",
            circle_off_diagonal_planner().unwrap(),
        ),
        (
            "diagonal",
            diagonal_planner(&fiberplan::geometry::Space::circle()).unwrap(),
        ),
        ("sphere-1", sphere_antipodal_planner(1).unwrap()),
        ("sphere-2", sphere_antipodal_planner(2).unwrap()),
        ("sphere-3", sphere_antipodal_planner(3).unwrap()),
    ];
    let cfg = VerificationConfig {
        n_samples: FULL_SAMPLES,
        eps_space: ENDPOINT_TOL,
        workers: 2,
        ..VerificationConfig::default()
    };
    let mut pass = true;
    for (name, pl) in &suite {
        let lp = pl.to_loop().unwrap();
        if lp.piece_count() != pl.piece_count() {
            eprintln!("{name}: loop count changed");
            pass = false;
            continue;
        }
        let report = verify_planner(&lp, None, &cfg).unwrap();
        let loop_ok = report.check("loop_contract").unwrap().status == CheckStatus::Pass;
        if !(report.overall_pass && loop_ok) {
            eprintln!("{name}: {report:#?}");
            pass = false;
        }
    }
    announce(
        6,
        "loop conversion preserves counts and the 0/half/1 contract",
        pass,
    );
    assert!(pass);
}

#[test]
fn c07_cat_witnesses_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cat = run_scenario_file("cat-circle", dir.path());
    let based = run_scenario_file("based-loop-circle", dir.path());
    let cat_check = cat.verification.check("cat_witness").unwrap();
    let mut pass = cat.passed()
        && cat_check.status == CheckStatus::Pass
        && cat_check.note.as_deref() == Some("2 entries")
        && cat.verification.piece_count == 2
        && based.passed()
        && based.verification.mode == "based-loop"
        && based.verification.check("loop_contract").unwrap().status == CheckStatus::Pass;

    // Round-trip count equality for every suite planner with a base-slice
    // domain.
    let circle = fiberplan::geometry::Space::circle();
    let base = circle.point(vec![1.0, 0.0]).unwrap();
    let slice = base_slice_domain(&circle, &base).unwrap();
    let suite = vec![
        circle_planner().unwrap(),
        combine_cover_planners(&[
            circle_off_antipodal_planner().unwrap(),
            circle_off_diagonal_planner().unwrap(),
        ])
        .unwrap(),
    ];
    for pl in suite {
        let restricted = pl.restrict(slice.clone()).unwrap();
        let witness = planner_to_cat_cover(&restricted).unwrap();
        let rebuilt = cat_cover_to_planner(&witness).unwrap();
        pass &= rebuilt.piece_count() == restricted.piece_count();
    }
    announce(7, "category-cover witnesses and round trips", pass);
    assert!(pass, "cat {cat:#?}\nbased {based:#?}");
}

#[test]
fn c08_subadditive_combination_and_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let combined = run_scenario_file("combine-halves", dir.path());
    let diagonal = run_scenario_file("diagonal-circle", dir.path());
    let pass = combined.passed()
        && combined.verification.piece_count == 2
        && diagonal.passed()
        && diagonal.verification.piece_count == 1;
    announce(
        8,
        "half-domain combination (2 pieces) and diagonal (1 piece)",
        pass,
    );
    assert!(pass, "combined {combined:#?}\ndiagonal {diagonal:#?}");
}

#[test]
fn c09_negative_controls_fail_exactly_their_check() {
    let dir = tempfile::tempdir().unwrap();
    let intended = [
        ("neg-gap", "partition"),
        ("neg-overlap", "partition"),
        ("neg-endpoint", "section_contract"),
        ("neg-midpoint", "loop_contract"),
        ("neg-seam", "continuity_modulus"),
    ];
    let mut pass = true;
    for (name, check) in intended {
        let report = run_scenario_file(name, dir.path());
        if report.passed() {
            eprintln!("{name}: unexpectedly passed");
            pass = false;
            continue;
        }
        let failed: Vec<&str> = report
            .verification
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect();
        if failed != vec![check] {
            eprintln!("{name}: failed {failed:?}, intended only [{check}]");
            pass = false;
        }
    }
    // The deliberate count mismatch: every check passes, the run still fails.
    let mismatch = run_scenario_file("neg-count-mismatch", dir.path());
    if mismatch.passed() || !mismatch.verification.overall_pass || mismatch.count_ok {
        eprintln!("neg-count-mismatch: {mismatch:#?}");
        pass = false;
    }
    announce(9, "negative controls fail exactly the intended check", pass);
    assert!(pass);
}

#[test]
fn c10_reports_are_deterministic_and_merge_associatively() {
    let dir = tempfile::tempdir().unwrap();
    let mut pass = true;
    // Byte-identical report files across reruns with the same seed.
    for name in ["circle", "sphere-even-2", "klein-quotient"] {
        let cfg = ScenarioConfig::load(&scenario_dir().join(format!("{name}.json"))).unwrap();
        let bytes = |tag: &str| {
            let path = dir.path().join(format!("{name}-{tag}.json"));
            let overrides = Overrides {
                report_path: Some(path.clone()),
                export_dir: Some(dir.path().to_path_buf()),
                ..Overrides::default()
            };
            run_scenario(&cfg, &overrides).unwrap();
            std::fs::read(path).unwrap()
        };
        if bytes("first") != bytes("second") {
            eprintln!("{name}: reports differ across reruns");
            pass = false;
        }
    }
    // Worker-count independence of the in-process report.
    let c = circle_planner().unwrap();
    let torus = product_planner(&c, &c, &fiberplan::geometry::Space::torus2()).unwrap();
    let mut cfg = VerificationConfig {
        n_samples: 2000,
        ..VerificationConfig::default()
    };
    let reference = verify_planner(&torus, None, &cfg)
        .unwrap()
        .to_json()
        .unwrap();
    for workers in [2, 5] {
        cfg.workers = workers;
        let report = verify_planner(&torus, None, &cfg)
            .unwrap()
            .to_json()
            .unwrap();
        if report != reference {
            eprintln!("workers={workers}: report bytes differ");
            pass = false;
        }
    }
    announce(10, "deterministic reports and associative merging", pass);
    assert!(pass);
}
