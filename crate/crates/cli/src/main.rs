use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use noisy_mbqc_cli::{emit_report, load_experiment, run_experiment_filtered, write_report, ReportFormat};

#[derive(Parser)]
#[command(name = "noisy-mbqc", version, about = "Compare closed-form noise mappings against a density-matrix oracle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment document and write the comparison report.
    Run {
        spec: PathBuf,
        /// Report path; `.csv` selects CSV, anything else JSON. Defaults to JSON on stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the document's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the document's tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Only run cases whose name contains this string.
        #[arg(long)]
        cases: Option<String>,
    },
}

fn main() -> ExitCode {
    let Command::Run { spec, out, seed, tol, cases } = Cli::parse().command;
    let mut experiment = match load_experiment(&spec) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = seed {
        experiment.seed = seed;
    }
    if let Some(tol) = tol {
        if !(tol.is_finite() && tol >= 0.0) {
            eprintln!("error: --tol must be a non-negative number");
            return ExitCode::from(2);
        }
        experiment.tolerance = tol;
    }
    let mut report = match run_experiment_filtered(&experiment, cases.as_deref()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    report.metadata.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());

    let written = match &out {
        Some(path) => emit_report(&report, ReportFormat::from_path(path), path),
        None => write_report(&report, ReportFormat::Json, std::io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(2);
    }

    let s = &report.summary;
    eprintln!(
        "{} cases, max entry diff {:.3e}, max trace distance {:.3e}, tolerance {:e}: {}",
        s.cases,
        s.max_entry_diff,
        s.max_trace_distance,
        s.tolerance,
        if s.pass { "PASS" } else { "FAIL" }
    );
    if s.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
