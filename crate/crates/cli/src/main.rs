//! `qrw`: verify identities, sweep step sizes and run demos from a config.
//!
//! Log level comes from `QRW_LOG` (default `info`).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrw::experiment::{self, Status, SweepOutput, DEMOS};

#[derive(Parser)]
#[command(
    name = "qrw",
    version,
    about = "Quantum random walks on finite C*-bialgebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check bialgebra axioms, structure relations and walk-step identities.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Directory for report.json; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare walk matrix elements with the cocycle over an h sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a ready-made config and run verify and sweep on it.
    Demo {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn config_error(e: qrw::Error) -> Status {
    eprintln!("error: {e}");
    Status::ConfigError
}

fn verify(config: &Path, out: Option<&Path>) -> Status {
    let exp = match experiment::load_experiment(config) {
        Ok(e) => e,
        Err(e) => return config_error(e),
    };
    match experiment::run_verify(&exp, out) {
        Ok((report, status)) => {
            if out.is_none() {
                println!("{}", qrw::io::to_pretty_json(&report));
            }
            if let Some(f) = &report.failure {
                eprintln!("verify failed: {f}");
            }
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!(
                    "verify failed: {} = {:e} (tolerance {:e})",
                    c.name, c.value, c.tolerance
                );
            }
            println!(
                "verify {}: {}",
                report.name,
                if report.passed { "passed" } else { "FAILED" }
            );
            status
        }
        Err(e) => config_error(e),
    }
}

fn sweep(config: &Path, out: &Path) -> Status {
    let exp = match experiment::load_experiment(config) {
        Ok(e) => e,
        Err(e) => return config_error(e),
    };
    match experiment::run_sweep(&exp, out) {
        Ok((SweepOutput::Table(t), status)) => {
            let s = &t.summary;
            println!(
                "sweep {}: {} rows, final max error {:e} (bound {:e}), tail slope {}, monotone tail {}",
                t.name,
                s.rows,
                s.final_max_error,
                s.error_bound,
                s.error_slope.map_or("n/a".into(), |x| format!("{x:.3}")),
                s.monotone_tail
            );
            status
        }
        Ok((SweepOutput::BialgebraFailure { failure, .. }, status)) => {
            eprintln!("sweep failed: {failure}");
            status
        }
        Err(e) => config_error(e),
    }
}

fn demo(name: &str, out: &Path) -> Status {
    if !DEMOS.iter().any(|(n, _)| *n == name) {
        eprintln!("error: unknown demo {name:?}; available demos:");
        for (n, about) in DEMOS {
            eprintln!("  {n:<12} {about}");
        }
        return Status::ConfigError;
    }
    match experiment::cmd_demo(name, out) {
        Ok((report, status)) => {
            println!(
                "verify {}: {}",
                name,
                if report.verify.passed {
                    "passed"
                } else {
                    "FAILED"
                }
            );
            if let Some(t) = &report.sweep {
                println!(
                    "sweep {}: final max error {:e}, final/initial {:.4}, gap slope {}",
                    name,
                    t.summary.final_max_error,
                    t.summary.final_over_initial,
                    t.summary
                        .gap_slope_all
                        .map_or("n/a".into(), |x| format!("{x:.3}"))
                );
            }
            println!("artifacts in {}", out.display());
            status
        }
        Err(e) => config_error(e),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QRW_LOG", "info")).init();
    let cli = Cli::parse();
    let status = match &cli.command {
        Command::Verify { config, out } => verify(config, out.as_deref()),
        Command::Sweep { config, out } => sweep(config, out),
        Command::Demo { name, out } => demo(name, out),
    };
    ExitCode::from(status.code() as u8)
}
