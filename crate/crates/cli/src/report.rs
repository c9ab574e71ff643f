//! `report.json` and the CSV writers.
//!
//! Reports hold only run inputs and computed values (no timestamps, no
//! absolute paths), keyed in sorted order, so equal runs give equal bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// An assertion did not hold.
    Fail,
    /// The scenario could not run to completion.
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::Fail | Self::Error => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One scenario assertion: `value < threshold` or `value >= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub metric: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub status: Status,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    /// Names of the metrics whose checks failed.
    pub failed: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// File names written next to the report.
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(scenario: &str, seed: u64) -> Self {
        Self {
            scenario: scenario.into(),
            seed,
            status: Status::Pass,
            metrics: BTreeMap::new(),
            checks: Vec::new(),
            failed: Vec::new(),
            error: None,
            artifacts: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), value);
    }

    /// Records `value` and asserts it stays strictly below `threshold`.
    pub fn below(&mut self, name: &str, value: f64, threshold: f64) -> bool {
        self.check(name, value, Comparison::Below, threshold, value < threshold)
    }

    /// Records `value` and asserts it is at least `threshold`.
    pub fn at_least(&mut self, name: &str, value: f64, threshold: f64) -> bool {
        self.check(name, value, Comparison::AtLeast, threshold, value >= threshold)
    }

    fn check(&mut self, name: &str, value: f64, comparison: Comparison, threshold: f64, passed: bool) -> bool {
        self.metric(name, value);
        self.checks.push(Check {
            metric: name.into(),
            value,
            comparison,
            threshold,
            passed,
        });
        if !passed {
            self.failed.push(name.into());
            if self.status == Status::Pass {
                self.status = Status::Fail;
            }
        }
        passed
    }

    pub fn fail_with(&mut self, error: impl ToString) {
        self.status = Status::Error;
        self.error = Some(error.to_string());
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports contain only serializable data");
        text.push('\n');
        text
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())
    }
}

/// Writes a header plus rows of already formatted fields. Fields are quoted
/// only when they need it; numbers use Rust's shortest round-trip form with a
/// '.' decimal separator.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}

pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// A vector packed into a single CSV field, entries separated by ';'.
pub fn packed(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}
