//! Command-line front end: case generation, solving, scoring, pattern
//! export, and code-table emission.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 when one or
//! more cases failed to solve.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use beamsynth::cases::generate_cases;
use beamsynth::config::RunConfig;
use beamsynth::encoding::build_phase_code;
use beamsynth::error::{Error, Result};
use beamsynth::io::{
    build_summary, read_cases, read_result, read_run_config, write_cases, write_pattern_csv,
    write_result, write_summary,
};
use beamsynth::pipeline::{export_pattern, run_batch};
use beamsynth::scoring::score_grid;

#[derive(Parser)]
#[command(name = "beamsynth", version, about = "Hybrid beam pattern synthesis for linear arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded list of benchmark cases.
    GenCases {
        /// Number of cases.
        #[arg(long)]
        n: usize,
        /// Generation seed.
        #[arg(long)]
        seed: u64,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve cases and write one result JSON per case.
    Solve {
        /// Case list (JSON array).
        #[arg(long)]
        cases: PathBuf,
        /// Solve only this case id.
        #[arg(long)]
        case_id: Option<u64>,
        /// Run config (TOML); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for result files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize a results directory: per-case breakdowns plus the mean.
    Score {
        /// Directory of case_*.json results.
        #[arg(long)]
        results: PathBuf,
        /// Summary JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Export one result's pattern as CSV on the scoring grid.
    Pattern {
        /// Result JSON path.
        #[arg(long)]
        result: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit a phase code's coefficients and allowed grid as JSON.
    Codegen {
        /// Phase bits, 1 to 4.
        #[arg(long)]
        bits: u8,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = cap_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Case(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// `BEAM_THREADS` caps the global worker pool before any parallel work.
fn cap_threads() -> Result<()> {
    match std::env::var("BEAM_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let n: usize = v
                .parse()
                .map_err(|_| Error::Config(format!("BEAM_THREADS '{v}' is not a thread count")))?;
            if n == 0 {
                return Err(Error::Config("BEAM_THREADS must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::GenCases { n, seed, out } => {
            let cases = generate_cases(n, seed);
            write_cases(&out, &cases)?;
            println!("wrote {} cases to {}", cases.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { cases, case_id, config, out } => {
            let mut list = read_cases(&cases)?;
            if let Some(id) = case_id {
                list.retain(|c| c.case_id == id);
                if list.is_empty() {
                    return Err(Error::Config(format!("case {id} not found in the case list")));
                }
            }
            let run_config = match config {
                Some(path) => read_run_config(&path)?,
                None => RunConfig::default(),
            };
            let outcome = run_batch(&list, &run_config)?;
            for result in &outcome.results {
                let path = write_result(&out, result)?;
                println!(
                    "case {}: y={:.2} ({}, {:.2}s) -> {}",
                    result.case_id,
                    result.breakdown.y,
                    result.branch_provenance,
                    result.elapsed_seconds,
                    path.display()
                );
            }
            for (id, message) in &outcome.failures {
                eprintln!("case {id} failed: {message}");
            }
            println!("mean score {:.2} over {} cases", outcome.mean_score, list.len());
            if outcome.failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Command::Score { results, out } => {
            let loaded = beamsynth::io::read_results_dir(&results)?;
            let summary = build_summary(&loaded)?;
            write_summary(&out, &summary)?;
            println!(
                "mean score {:.2} over {} cases -> {}",
                summary.mean_score,
                summary.n_cases,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Pattern { result, out } => {
            let loaded = read_result(&result)?;
            let excitation = loaded.excitation.to_excitation()?;
            let rows = export_pattern(&excitation, &score_grid())?;
            write_pattern_csv(&out, &rows)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Codegen { bits, out } => {
            let code = build_phase_code(bits)?;
            let payload = serde_json::json!({
                "bits": code.bits(),
                "spins_per_antenna": code.spins_per_antenna(),
                "allowed_grid_rad": code.allowed_grid(),
                "coefficients": code
                    .coefficients()
                    .iter()
                    .map(|c| serde_json::json!({ "re": c.re, "im": c.im }))
                    .collect::<Vec<_>>(),
            });
            let mut text =
                serde_json::to_string_pretty(&payload).map_err(|e| Error::Parse(e.to_string()))?;
            text.push('\n');
            std::fs::write(&out, text)?;
            println!("wrote {bits}-bit code tables to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
