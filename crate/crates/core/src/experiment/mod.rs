//! Config-driven experiment runner: axiom and identity verification,
//! convergence sweeps against the cocycle oracle, and report emission.

pub mod config;
pub mod demo;
pub mod sweep;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bialgebra::verify_bialgebra;
use crate::error::{Error, Result};

pub use config::{Experiment, ExperimentConfig};
pub use demo::{demo_config, demo_names, DEMOS};
pub use sweep::{cmd_sweep, loglog_slope, summarize, ErrorRow, ErrorTable, SweepSummary};
pub use verify::{cmd_verify, Check, VerifyReport};

/// Process exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Passed,
    ChecksFailed,
    ConfigError,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Passed => 0,
            Status::ChecksFailed => 1,
            Status::ConfigError => 2,
        }
    }

    fn from_pass(passed: bool) -> Self {
        if passed {
            Status::Passed
        } else {
            Status::ChecksFailed
        }
    }
}

/// Reads and resolves a config; every failure here is a config error.
pub fn load_experiment(path: &Path) -> Result<Experiment> {
    let cfg = ExperimentConfig::from_path(path)?;
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Experiment::from_config(&cfg, &base)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Runs `verify`, writing report.json into `out` when given.
pub fn run_verify(exp: &Experiment, out: Option<&Path>) -> Result<(VerifyReport, Status)> {
    let report = cmd_verify(exp);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("report.json"), &report)?;
    }
    let status = Status::from_pass(report.passed);
    Ok((report, status))
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum SweepOutput {
    Table(ErrorTable),
    BialgebraFailure {
        name: String,
        passed: bool,
        failure: String,
    },
}

/// Runs `sweep` into `out`: report.json, errors.csv and errors.dat.
pub fn run_sweep(exp: &Experiment, out: &Path) -> Result<(SweepOutput, Status)> {
    fs::create_dir_all(out)?;
    if let Some(err) = verify_bialgebra(&exp.b).first_failure(exp.tol.identity) {
        let output = SweepOutput::BialgebraFailure {
            name: exp.name.clone(),
            passed: false,
            failure: err.to_string(),
        };
        write_json(&out.join("report.json"), &output)?;
        return Ok((output, Status::ChecksFailed));
    }
    let table = cmd_sweep(exp)?;
    write_table(&table, out)?;
    write_json(&out.join("report.json"), &table)?;
    let status = Status::from_pass(table.summary.passed);
    Ok((SweepOutput::Table(table), status))
}

fn write_table(table: &ErrorTable, out: &Path) -> Result<()> {
    fs::write(out.join("errors.csv"), table.to_csv()?)?;
    fs::write(out.join("errors.dat"), table.to_dat())?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoReport {
    pub demo: String,
    pub verify: VerifyReport,
    pub sweep: Option<ErrorTable>,
}

/// Writes the demo config (and any file it needs) into `out`, reloads it
/// from disk and runs verify then sweep. report.json holds both results.
pub fn cmd_demo(name: &str, out: &Path) -> Result<(DemoReport, Status)> {
    let (cfg, extra) = demo_config(name).ok_or_else(|| {
        Error::Config(format!(
            "unknown demo {name:?}; available: {}",
            demo_names().join(", ")
        ))
    })?;
    fs::create_dir_all(out)?;
    if let Some((file, contents)) = extra {
        fs::write(out.join(file), contents)?;
    }
    let cfg_path = out.join("config.json");
    fs::write(&cfg_path, cfg.to_json() + "\n")?;
    let exp = load_experiment(&cfg_path)?;
    let verify = cmd_verify(&exp);
    let sweep = if verify.passed {
        let table = cmd_sweep(&exp)?;
        write_table(&table, out)?;
        Some(table)
    } else {
        None
    };
    let passed = verify.passed && sweep.as_ref().is_some_and(|t| t.summary.passed);
    let report = DemoReport {
        demo: name.into(),
        verify,
        sweep,
    };
    write_json(&out.join("report.json"), &report)?;
    Ok((report, Status::from_pass(passed)))
}
