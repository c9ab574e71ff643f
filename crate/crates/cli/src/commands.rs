//! The one-shot subcommands. Each returns the text to print and an exit code.

use std::fs;
use std::path::Path;

use lagroid_core::algebra::{check_positive_type, GroupoidFunction, Measure, State};
use lagroid_core::algebroid::{geodesic_flow, AlgebroidState};
use lagroid_core::chart::RiemannianChart;
use lagroid_core::groupoid::{groupoid_from_json, validate_groupoid, FiniteGroupoid, FunctionDocument};
use lagroid_core::pair::{quadratic_expansion, FdOptions, PairGeometry, TwoPointLagrangian};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::json;

use crate::report::num;
use crate::scenarios::trajectory_table;

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// Input that does not parse; maps to exit code 2.
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] lagroid_core::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String, CommandError> {
    fs::read_to_string(path).map_err(|source| CommandError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_groupoid(path: &Path) -> Result<FiniteGroupoid, CommandError> {
    groupoid_from_json(&read(path)?).map_err(|e| CommandError::Parse(e.to_string()))
}

fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

pub fn validate(path: &Path) -> Result<Output, CommandError> {
    let g = load_groupoid(path)?;
    let report = validate_groupoid(&g);
    let messages: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
    let text = pretty(&json!({
        "valid": report.is_valid(),
        "objects": g.object_count(),
        "morphisms": g.morphism_count(),
        "violations": report.violations,
        "messages": messages,
    }));
    Ok(Output {
        text,
        code: if report.is_valid() { 0 } else { 1 },
    })
}

pub fn expand(chart: &str, x: &[f64], m: f64, c_k: f64) -> Result<Output, CommandError> {
    let chart = RiemannianChart::by_name(chart, x.len())?;
    let tpl = TwoPointLagrangian::canonical(PairGeometry::new(chart)?, m, c_k);
    let e = quadratic_expansion(&tpl, &DVector::from_column_slice(x), &FdOptions::default())?;
    Ok(Output {
        text: pretty(&e),
        code: 0,
    })
}

/// Geodesic path as CSV with columns `s, x_*, xi_*, energy, eta_norm`.
pub fn geodesic(chart: &str, x: &[f64], v: &[f64], s_max: f64, step: f64) -> Result<Output, CommandError> {
    let chart = RiemannianChart::by_name(chart, x.len())?;
    let geometry = PairGeometry::new(chart.clone())?;
    let init = AlgebroidState::new(x.to_vec(), v.to_vec());
    let path = geodesic_flow(geometry.connection(), &init, s_max, step)?;
    let (header, rows) = trajectory_table(&path, |s| 0.5 * chart.norm(&s.x, &s.xi).powi(2), |s| chart.norm(&s.x, &s.xi));
    let mut w = csv::Writer::from_writer(Vec::new());
    let write = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
        w.write_record(&header)?;
        for row in &rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    };
    write(&mut w).expect("writing to memory");
    let text = String::from_utf8(w.into_inner().expect("flushed")).expect("csv output is utf-8");
    let code = match path.termination {
        lagroid_core::algebroid::Termination::Completed => 0,
        lagroid_core::algebroid::Termination::ChartExit { s } => {
            eprintln!("geodesic left the chart at s = {}", num(s));
            1
        }
    };
    Ok(Output { text, code })
}

pub fn state_check(groupoid: &Path, phi: &Path) -> Result<Output, CommandError> {
    let g = load_groupoid(groupoid)?;
    let doc: FunctionDocument = serde_json::from_str(&read(phi)?).map_err(|e| CommandError::Parse(e.to_string()))?;
    let phi = GroupoidFunction::from_document(&g, &doc)?;
    let nu = Measure::counting(&g);
    let report = check_positive_type(&g, &nu, &phi)?;
    let z = State::new(&g, &nu, &phi)?.normalization();
    let text = pretty(&json!({
        "positive": report.is_positive(),
        "min_eigenvalue": report.min_eigenvalue(),
        "hermitian_defect": report.hermitian_defect,
        "rank": report.rank(),
        "tolerance": report.tolerance,
        "eigenvalues": report.eigenvalues,
        "normalization": [z.re, z.im],
    }));
    Ok(Output {
        text,
        code: if report.is_positive() { 0 } else { 1 },
    })
}
