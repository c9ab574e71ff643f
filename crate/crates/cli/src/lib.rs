//! Scenario runner and artifact emitters for `lagroid`.
//!
//! Exit codes: 0 when every assertion holds, 1 on a failed assertion or a
//! runtime error (the failing metric or error is named in `report.json`),
//! 2 when the input does not match its schema.

pub mod commands;
pub mod config;
pub mod report;
pub mod scenarios;
pub mod svg;

use std::path::{Path, PathBuf};

use config::{salvage_output_dir, ConfigError, ScenarioConfig};
use report::Report;

/// Output directory used when neither the config nor the caller names one.
pub const DEFAULT_OUTPUT_DIR: &str = "lagroid-out";

pub const EXIT_SCHEMA: i32 = 2;

/// Loads and runs a scenario file, returning the process exit code.
pub fn run_config(path: &Path, output_dir: Option<&Path>) -> i32 {
    let config = match ScenarioConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            let dir = output_dir
                .map(Path::to_path_buf)
                .or_else(|| std::fs::read_to_string(path).ok().and_then(|t| salvage_output_dir(&t)));
            if let (Some(dir), ConfigError::Schema(_)) = (dir, &e) {
                let mut report = Report::new("unknown", 0);
                report.fail_with(&e);
                if let Err(io) = report.write(&dir) {
                    eprintln!("error: cannot write report: {io}");
                }
            }
            return EXIT_SCHEMA;
        }
    };
    let dir: PathBuf = output_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    match scenarios::run(&config, &dir) {
        Ok(report) => {
            if let Some(err) = &report.error {
                eprintln!("error: {err}");
            }
            for name in &report.failed {
                eprintln!("failed: {name} = {:e}", report.metrics[name]);
            }
            report.status.exit_code()
        }
        Err(e) => {
            eprintln!("error: cannot write report: {e}");
            1
        }
    }
}
