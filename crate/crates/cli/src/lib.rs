//! Experiment runner for `fv-core`: validated JSON configs, CSV/JSON output
//! and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod experiments;
pub mod output;
pub mod report;

use anyhow::Result;
use std::path::{Path, PathBuf};

pub use config::ExperimentConfig;
pub use experiments::{run, Outcome};
pub use report::{Check, Report};

/// Exit status for a run that completed but failed a check.
pub const EXIT_FAILED_CHECKS: i32 = 2;
/// Exit status for invalid input or a module error.
pub const EXIT_ERROR: i32 = 1;

/// Writes `<id>.csv` and `<id>.json` into `dir`; returns both paths.
pub fn write_outcome(dir: &Path, outcome: &Outcome) -> Result<(PathBuf, PathBuf)> {
    let id = &outcome.report.experiment;
    let csv = dir.join(format!("{id}.csv"));
    let json = dir.join(format!("{id}.json"));
    output::write_atomic(&csv, &outcome.csv)?;
    output::write_json(&json, &outcome.report)?;
    Ok((csv, json))
}

/// Sizes the global rayon pool; `None` keeps rayon's default.
pub fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
