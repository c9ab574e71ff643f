//! Scenario configuration: a single JSON document with a fixed key schema.
//! Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Euclidean,
    Sphere,
    Hyperbolic,
    So3,
    PairGroupoidState,
    Custom,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::Sphere => "sphere",
            Self::Hyperbolic => "hyperbolic",
            Self::So3 => "so3",
            Self::PairGroupoidState => "pair-groupoid-state",
            Self::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Assertion thresholds. Every entry must be strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `max |η − m I|` on flat charts.
    pub hessian: f64,
    /// `max |A|` on flat charts.
    pub gauge: f64,
    /// `|V|` on flat charts.
    pub potential: f64,
    /// Relative Hessian error on curved charts.
    pub hessian_rel: f64,
    /// Lower bound on the remainder log-log slope.
    pub slope_min: f64,
    /// Energy and Casimir drift.
    pub drift: f64,
    /// Relative error against the independent rigid-body integrator.
    pub reference: f64,
    /// Allowed negative eigenvalue of a positivity form.
    pub positivity: f64,
    /// Geodesic speed drift.
    pub speed: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hessian: 1e-6,
            gauge: 1e-8,
            potential: 1e-10,
            hessian_rel: 1e-4,
            slope_min: 2.7,
            drift: 1e-6,
            reference: 1e-5,
            positivity: 1e-10,
            speed: 1e-7,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 9] {
        [
            ("hessian", self.hessian),
            ("gauge", self.gauge),
            ("potential", self.potential),
            ("hessian_rel", self.hessian_rel),
            ("slope_min", self.slope_min),
            ("drift", self.drift),
            ("reference", self.reference),
            ("positivity", self.positivity),
            ("speed", self.speed),
        ]
    }
}

/// One scenario run. Omitted numeric fields take per-scenario defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// Chart dimension (euclidean) or object count (pair-groupoid-state).
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(rename = "c_K")]
    pub c_k: Option<f64>,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "default_step")]
    pub step: f64,
    pub t_max: Option<f64>,
    /// Number of sample points for the expansion scenarios.
    pub points: Option<usize>,
    /// Principal moments for `so3`.
    pub inertia: Option<[f64; 3]>,
    /// Initial angular velocity for `so3`.
    pub omega0: Option<[f64; 3]>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Groupoid document for `custom`, relative to the config file.
    pub groupoid: Option<PathBuf>,
    /// Function document for `custom`, relative to the config file.
    pub phi: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

fn default_step() -> f64 {
    1e-3
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("schema violation: {0}")]
    Schema(String),
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for file in [&mut config.groupoid, &mut config.phi].into_iter().flatten() {
            if file.is_relative() {
                *file = base.join(&*file);
            }
        }
        Ok(config)
    }

    fn check(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Schema(msg));
        for (name, value) in self.tolerances.entries() {
            if !(value > 0.0 && value.is_finite()) {
                return bad(format!("tolerances.{name} must be positive, got {value}"));
            }
        }
        let mut positive = vec![("m", Some(self.m)), ("hbar", Some(self.hbar)), ("step", Some(self.step))];
        positive.extend([("c_K", self.c_k), ("t_max", self.t_max)]);
        for (name, value) in positive {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if let Some(i) = self.inertia {
            if i.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return bad(format!("inertia must have positive entries, got {i:?}"));
            }
        }
        if self.points == Some(0) {
            return bad("points must be at least 1".into());
        }
        if self.scenario == ScenarioKind::Custom && (self.groupoid.is_none() || self.phi.is_none()) {
            return bad("scenario custom needs both groupoid and phi".into());
        }
        Ok(())
    }
}

/// Best-effort `output_dir` from a document that failed validation, so the
/// failure can still be reported next to the other artifacts.
pub fn salvage_output_dir(text: &str) -> Option<PathBuf> {
    let value: serde_json::Value = serde_json::from_str(text).ok()?;
    value.get("output_dir")?.as_str().map(PathBuf::from)
}
