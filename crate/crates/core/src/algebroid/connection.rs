use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use super::model::{build_tangent_algebroid, AlgebroidModel};
use crate::chart::RiemannianChart;
use crate::error::{Error, Result};
use crate::numeric::{spd_inverse, Tensor3};

type CoefficientField = Arc<dyn Fn(&DVector<f64>) -> Result<Tensor3> + Send + Sync>;

/// An A-connection `∇_{σ_a} σ_b = Γ^c_ab σ_c` on a model.
#[derive(Clone)]
pub struct AConnection {
    model: AlgebroidModel,
    gamma: CoefficientField,
}

impl fmt::Debug for AConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AConnection").field("model", &self.model).finish()
    }
}

impl AConnection {
    pub fn new<F>(model: AlgebroidModel, gamma: F) -> Self
    where
        F: Fn(&DVector<f64>) -> Result<Tensor3> + Send + Sync + 'static,
    {
        Self {
            model,
            gamma: Arc::new(gamma),
        }
    }

    pub fn model(&self) -> &AlgebroidModel {
        &self.model
    }

    /// `Γ[c][a][b]` at `x`.
    pub fn coefficients(&self, x: &DVector<f64>) -> Result<Tensor3> {
        (self.gamma)(x)
    }

    /// `Γ^c_ab − Γ^c_ba − C^c_ab`, largest entry.
    pub fn torsion_defect(&self, x: &DVector<f64>) -> Result<f64> {
        let g = self.coefficients(x)?;
        let c = self.model.structure(x);
        let r = g.dim();
        let mut worst = 0.0_f64;
        for e in 0..r {
            for a in 0..r {
                for b in 0..r {
                    worst = worst.max((g.get(e, a, b) - g.get(e, b, a) - c.get(e, a, b)).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// The torsion-free, metric-preserving A-connection of the model's fiber
/// metric, from the algebroid Koszul formula
///
/// `2η(∇_a σ_b, σ_c) = μ_a(η_bc) + μ_b(η_ac) − μ_c(η_ab)
///                     + η([σ_a,σ_b],σ_c) − η([σ_a,σ_c],σ_b) − η([σ_b,σ_c],σ_a)`.
pub fn levi_civita_connection(model: &AlgebroidModel) -> Result<AConnection> {
    if !model.has_metric() {
        return Err(Error::InvalidArgument("model has no fiber metric".into()));
    }
    let probe = model.domain().reference_point();
    koszul_coefficients(model, &probe)?;
    let m = model.clone();
    Ok(AConnection::new(model.clone(), move |x| koszul_coefficients(&m, x)))
}

/// Levi-Civita connection of a chart's tangent algebroid. With zero brackets
/// and identity anchor the Koszul coefficients reduce to the Christoffel
/// symbols, so analytic ones are used directly when the chart provides them.
pub fn tangent_levi_civita(chart: &RiemannianChart) -> Result<AConnection> {
    let model = build_tangent_algebroid(chart);
    if !chart.has_analytic_christoffel() {
        return levi_civita_connection(&model);
    }
    let probe = model.domain().reference_point();
    koszul_coefficients(&model, &probe)?;
    let c = chart.clone();
    Ok(AConnection::new(model, move |x| Ok(c.christoffel(x))))
}

fn koszul_coefficients(model: &AlgebroidModel, x: &DVector<f64>) -> Result<Tensor3> {
    let eta = model.metric(x).expect("checked for a metric");
    let degenerate = || Error::DegenerateMetric {
        point: x.iter().copied().collect(),
    };
    let eta_inv = spd_inverse(&eta).ok_or_else(degenerate)?;
    let r = model.rank();
    let c = model.structure(x);
    let mu = model.anchor(x);
    let d_eta = model.metric_partials(x).expect("checked for a metric");

    let n = model.base_dim();

    // lie[(a * r + b) * r + c] = μ^k_a ∂_k η_bc
    let mut lie = vec![0.0; r * r * r];
    for a in 0..r {
        for k in 0..n {
            let m = mu[(k, a)];
            if m == 0.0 {
                continue;
            }
            for b in 0..r {
                for cc in 0..r {
                    lie[(a * r + b) * r + cc] += m * d_eta[k][(b, cc)];
                }
            }
        }
    }
    // bracket[(a * r + b) * r + c] = η([σ_a, σ_b], σ_c) = C^d_ab η_dc
    let mut bracket = vec![0.0; r * r * r];
    for d in 0..r {
        for a in 0..r {
            for b in 0..r {
                let cdab = c.get(d, a, b);
                if cdab == 0.0 {
                    continue;
                }
                for cc in 0..r {
                    bracket[(a * r + b) * r + cc] += cdab * eta[(d, cc)];
                }
            }
        }
    }
    let idx = |a: usize, b: usize, cc: usize| (a * r + b) * r + cc;

    let mut lowered = vec![0.0; r * r * r];
    for a in 0..r {
        for b in 0..r {
            for cc in 0..r {
                lowered[idx(a, b, cc)] = 0.5
                    * (lie[idx(a, b, cc)] + lie[idx(b, a, cc)] - lie[idx(cc, a, b)] + bracket[idx(a, b, cc)]
                        - bracket[idx(a, cc, b)]
                        - bracket[idx(b, cc, a)]);
            }
        }
    }
    Ok(Tensor3::from_fn(r, |e, a, b| {
        (0..r).map(|cc| eta_inv[(e, cc)] * lowered[idx(a, b, cc)]).sum()
    }))
}
