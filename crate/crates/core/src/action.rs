//! Log-like action functionals and the Dirac-Feynman functions built from them.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{GroupoidFunction, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;

/// An action functional `S` on morphisms, a scale `hbar` and a probability
/// density `p` on objects.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionFunctionalData {
    pub action: Vec<f64>,
    pub hbar: f64,
    pub density: Vec<f64>,
}

impl ActionFunctionalData {
    /// `S(y, x) = F(y) - F(x)` on a pair groupoid.
    pub fn from_potential(
        g: &FiniteGroupoid,
        potential: &[f64],
        hbar: f64,
        density: Vec<f64>,
    ) -> Result<Self> {
        if potential.len() != g.object_count() {
            return Err(Error::Dimension(format!(
                "potential has {} entries for {} objects",
                potential.len(),
                g.object_count()
            )));
        }
        let action = (0..g.morphism_count())
            .map(|a| potential[g.target(a)] - potential[g.source(a)])
            .collect();
        Ok(Self {
            action,
            hbar,
            density,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogLikeViolation {
    /// `S(β ∘ α) ≠ S(β) + S(α)`.
    Additivity { beta: usize, alpha: usize, defect: f64 },
    /// `S(α⁻¹) ≠ -S(α)`.
    Antisymmetry { alpha: usize, defect: f64 },
}

impl std::fmt::Display for LogLikeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LogLikeViolation::Additivity { beta, alpha, defect } => {
                write!(f, "S({beta} ∘ {alpha}) off by {defect:e}")
            }
            LogLikeViolation::Antisymmetry { alpha, defect } => {
                write!(f, "S({alpha}⁻¹) + S({alpha}) = {defect:e}")
            }
        }
    }
}

/// Lists every additivity and antisymmetry failure of `action`.
pub fn loglike_validate(
    g: &FiniteGroupoid,
    action: &[f64],
    tolerance: f64,
) -> Result<Vec<LogLikeViolation>> {
    let k = g.morphism_count();
    if action.len() != k {
        return Err(Error::GroupoidMismatch {
            expected: k,
            found: action.len(),
        });
    }
    let mut out = Vec::new();
    for beta in 0..k {
        for alpha in 0..k {
            if let Some(r) = g.compose(beta, alpha) {
                let defect = action[r] - action[beta] - action[alpha];
                if defect.abs() > tolerance {
                    out.push(LogLikeViolation::Additivity { beta, alpha, defect });
                }
            }
        }
    }
    for alpha in 0..k {
        let defect = action[g.inverse(alpha)] + action[alpha];
        if defect.abs() > tolerance {
            out.push(LogLikeViolation::Antisymmetry { alpha, defect });
        }
    }
    Ok(out)
}

/// Recovers `F` with `S(y, x) = F(y) - F(x)` on a pair groupoid, normalized
/// so that `F(x₀) = 0` for the first object.
pub fn loglike_potential(g: &FiniteGroupoid, action: &[f64]) -> Result<Vec<f64>> {
    let pair = g.pair_index().ok_or(Error::NotPairGroupoid)?;
    if action.len() != g.morphism_count() {
        return Err(Error::GroupoidMismatch {
            expected: g.morphism_count(),
            found: action.len(),
        });
    }
    Ok((0..g.object_count()).map(|x| action[pair[x][0]]).collect())
}

/// `φ(α) = sqrt(p(s(α)) p(t(α))) exp(i S(α) / ħ)`.
pub fn dirac_feynman_function(
    g: &FiniteGroupoid,
    data: &ActionFunctionalData,
) -> Result<GroupoidFunction> {
    validate_density(g, &data.density)?;
    if !(data.hbar > 0.0 && data.hbar.is_finite()) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {}", data.hbar)));
    }
    let violations = loglike_validate(g, &data.action, loglike_tolerance(&data.action))?;
    if let Some(first) = violations.first() {
        return Err(Error::NotLogLike {
            violations: violations.len(),
            first: first.to_string(),
        });
    }
    Ok(GroupoidFunction::from_fn(g, |a| {
        let amp = (data.density[g.source(a)] * data.density[g.target(a)]).sqrt();
        Complex64::from_polar(amp, data.action[a] / data.hbar)
    }))
}

fn loglike_tolerance(action: &[f64]) -> f64 {
    let scale = action.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    DEFAULT_TOLERANCE * 1e2 * scale
}

fn validate_density(g: &FiniteGroupoid, p: &[f64]) -> Result<()> {
    if p.len() != g.object_count() {
        return Err(Error::InvalidDensity(format!(
            "{} weights for {} objects",
            p.len(),
            g.object_count()
        )));
    }
    if let Some(bad) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidDensity(format!("negative or non-finite weight {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDensity(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}
