//! Scenario runner: a JSON scenario in, a verification report out.
//!
//! Exit status: 0 when every check passed and the piece count matched the
//! scenario's expectation; 1 when a check or the count expectation failed
//! (the report is still written); 2 when the scenario could not be parsed,
//! validated, or built at all.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fiberplan::scenario::{run_scenario, Overrides, ScenarioConfig, ScenarioOutcome};
use fiberplan::verify::CheckStatus;

#[derive(Parser)]
#[command(
    name = "fiberplan",
    version,
    about = "Build, verify, and export partition-based motion planners from JSON scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario: build its planner, verify, write the JSON report.
    Run {
        /// Scenario configuration file (JSON).
        config: PathBuf,
        /// Override the verification seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of sampled domain members.
        #[arg(long)]
        samples: Option<usize>,
        /// Report destination (default: `<name>-report.json`).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Directory for path-polyline exports (default: working directory).
        #[arg(long)]
        export_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            samples,
            report,
            export_dir,
        } => run(config, seed, samples, report, export_dir),
    }
}

fn run(
    config: PathBuf,
    seed: Option<u64>,
    samples: Option<usize>,
    report: Option<PathBuf>,
    export_dir: Option<PathBuf>,
) -> ExitCode {
    let cfg = match ScenarioConfig::load(&config) {
        Ok(cfg) => cfg,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        seed,
        samples,
        report_path: report,
        export_dir,
    };
    match run_scenario(&cfg, &overrides) {
        Ok(outcome) => {
            print_outcome(&outcome);
            if outcome.report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn print_outcome(outcome: &ScenarioOutcome) {
    let report = &outcome.report;
    let v = &report.verification;
    println!(
        "scenario {}: {} piece(s) on {} ({} mode, {})",
        report.scenario, v.piece_count, v.space, v.mode, v.provenance
    );
    for check in &v.checks {
        let status = match check.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "skip",
        };
        let mut line = format!(
            "  {:<20} {}  worst {:.3e}  ({} samples)",
            check.name, status, check.worst, check.samples
        );
        if let Some(note) = &check.note {
            line.push_str(&format!("  [{note}]"));
        }
        println!("{line}");
    }
    match report.expected_piece_count {
        Some(want) if report.count_ok => {
            println!("piece count {} matches the expected {want}", v.piece_count)
        }
        Some(want) => println!(
            "piece count MISMATCH: expected {want}, built {}",
            v.piece_count
        ),
        None => {}
    }
    for path in &outcome.export_paths {
        println!("exported {}", path.display());
    }
    println!(
        "report written to {} ({})",
        outcome.report_path.display(),
        if report.passed() { "pass" } else { "fail" }
    );
}
