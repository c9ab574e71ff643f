use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chart::RiemannianChart;
use crate::error::{Error, Result};
use crate::numeric::{
    central_partial, fd_step, field, matrix_partials, ChartDomain, Field, Tensor3, BASE_FD_REL_STEP,
};

/// A Lie algebroid written in a local frame `σ_a` over a coordinate box:
/// structure functions `C^c_ab(x)` (`[σ_a, σ_b] = C^c_ab σ_c`), anchor
/// components `μ^k_a(x)` and an optional fiber metric `η_ab(x)`.
#[derive(Clone)]
pub struct AlgebroidModel {
    base_dim: usize,
    rank: usize,
    structure: Field<Tensor3>,
    anchor: Field<DMatrix<f64>>,
    metric: Option<Field<DMatrix<f64>>>,
    metric_partials: Option<Field<Vec<DMatrix<f64>>>>,
    domain: ChartDomain,
}

impl fmt::Debug for AlgebroidModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebroidModel")
            .field("base_dim", &self.base_dim)
            .field("rank", &self.rank)
            .field("has_metric", &self.metric.is_some())
            .field("domain", &self.domain)
            .finish()
    }
}

impl AlgebroidModel {
    /// A model from raw fields. Nothing beyond dimensions is checked; use
    /// [`verify_compatibility`] for the algebroid identities.
    ///
    /// `anchor(x)` must be `base_dim x rank` with entry `(k, a) = μ^k_a`.
    pub fn new(
        rank: usize,
        structure: Field<Tensor3>,
        anchor: Field<DMatrix<f64>>,
        domain: ChartDomain,
    ) -> Result<Self> {
        let base_dim = domain.dim();
        let probe = domain.reference_point();
        let c = structure(&probe);
        let mu = anchor(&probe);
        if c.dim() != rank {
            return Err(Error::Dimension(format!(
                "structure functions have rank {} but the model has rank {rank}",
                c.dim()
            )));
        }
        if mu.shape() != (base_dim, rank) {
            return Err(Error::Dimension(format!(
                "anchor is {:?}, expected ({base_dim}, {rank})",
                mu.shape()
            )));
        }
        Ok(Self {
            base_dim,
            rank,
            structure,
            anchor,
            metric: None,
            metric_partials: None,
            domain,
        })
    }

    /// Attaches a fiber metric `η_ab(x)`.
    pub fn with_metric(mut self, metric: Field<DMatrix<f64>>) -> Self {
        self.metric = Some(metric);
        self.metric_partials = None;
        self
    }

    /// Analytic `∂_k η_ab`, replacing central differences.
    pub fn with_metric_partials(mut self, partials: Field<Vec<DMatrix<f64>>>) -> Self {
        self.metric_partials = Some(partials);
        self
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn has_metric(&self) -> bool {
        self.metric.is_some()
    }

    pub fn structure(&self, x: &DVector<f64>) -> Tensor3 {
        (self.structure)(x)
    }

    pub fn anchor(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (self.anchor)(x)
    }

    pub fn metric(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        self.metric.as_ref().map(|m| m(x))
    }

    pub fn metric_field(&self) -> Option<&Field<DMatrix<f64>>> {
        self.metric.as_ref()
    }

    /// `∂_k η` at `x`, analytic when attached.
    pub fn metric_partials(&self, x: &DVector<f64>) -> Option<Vec<DMatrix<f64>>> {
        let metric = self.metric.as_ref()?;
        Some(match &self.metric_partials {
            Some(p) => p(x),
            None => matrix_partials(metric, x, BASE_FD_REL_STEP),
        })
    }

    pub fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideChart {
                point: x.iter().copied().collect(),
            });
        }
        Ok(())
    }
}

/// Tangent algebroid of a chart: coordinate frame, zero brackets, identity
/// anchor and the chart metric on the fibers.
pub fn build_tangent_algebroid(chart: &RiemannianChart) -> AlgebroidModel {
    let n = chart.dim();
    let metric_chart = chart.clone();
    let partials_chart = chart.clone();
    let model = AlgebroidModel::new(
        n,
        field(move |_| Tensor3::zeros(n)),
        field(move |_| DMatrix::identity(n, n)),
        chart.domain().clone(),
    )
    .expect("tangent algebroid dimensions are consistent")
    .with_metric(field(move |x| metric_chart.metric(x)));
    if chart.has_analytic_christoffel() {
        model.with_metric_partials(field(move |x| partials_chart.metric_partials(x)))
    } else {
        model
    }
}

/// Largest cyclic Jacobi sum `|Σ_cyc C^e_ad C^d_bc|` of constant structure constants.
pub fn jacobi_residual(c: &Tensor3) -> f64 {
    compatibility_at(c, None, &DMatrix::zeros(0, c.dim()), &[]).0
}

/// Largest `|C^c_ab + C^c_ba|`.
pub fn antisymmetry_residual(c: &Tensor3) -> f64 {
    let r = c.dim();
    let mut worst = 0.0_f64;
    for e in 0..r {
        for a in 0..r {
            for b in 0..r {
                worst = worst.max((c.get(e, a, b) + c.get(e, b, a)).abs());
            }
        }
    }
    worst
}

/// Lie algebra viewed as an algebroid over a point: zero-dimensional base,
/// vanishing anchor, constant brackets.
pub fn build_lie_algebra_algebroid(constants: Tensor3) -> Result<AlgebroidModel> {
    let r = constants.dim();
    for c in 0..r {
        for a in 0..r {
            for b in 0..r {
                if (constants.get(c, a, b) + constants.get(c, b, a)).abs() > 1e-12 {
                    return Err(Error::NotAntisymmetric { c, a, b });
                }
            }
        }
    }
    let scale = constants.as_slice().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let residual = jacobi_residual(&constants);
    if residual > 1e-10 * scale * scale {
        return Err(Error::JacobiViolation { residual });
    }
    AlgebroidModel::new(
        r,
        field(move |_| constants.clone()),
        field(move |_| DMatrix::zeros(0, r)),
        ChartDomain::unbounded(0),
    )
}

/// `so(3)` with `[σ_a, σ_b] = ε_abc σ_c`.
pub fn so3_algebroid() -> AlgebroidModel {
    build_lie_algebra_algebroid(Tensor3::levi_civita3()).expect("so(3) is a Lie algebra")
}

/// Action algebroid of the rotation action on `ℝ³`: `so(3)` brackets over
/// the base `ℝ³`, anchor `μ(σ_a)(x) = x × e_a`.
pub fn so3_action_algebroid() -> AlgebroidModel {
    AlgebroidModel::new(
        3,
        field(|_| Tensor3::levi_civita3()),
        field(|x| {
            let x = nalgebra::Vector3::new(x[0], x[1], x[2]);
            let mut mu = DMatrix::zeros(3, 3);
            for a in 0..3 {
                let col = x.cross(&nalgebra::Vector3::ith(a, 1.0));
                for k in 0..3 {
                    mu[(k, a)] = col[k];
                }
            }
            mu
        }),
        ChartDomain::unbounded(3),
    )
    .expect("action algebroid dimensions are consistent")
}

/// Residuals of the algebroid identities at a set of sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompatibilityReport {
    /// `max |Σ_cyc (C^e_ad C^d_bc + μ^k_a ∂_k C^e_bc)|`.
    pub bracket: f64,
    /// `max |μ^k_a ∂_k μ^j_b − μ^k_b ∂_k μ^j_a − C^c_ab μ^j_c|`.
    pub anchor: f64,
    /// `max |C^c_ab + C^c_ba|`.
    pub antisymmetry: f64,
}

impl CompatibilityReport {
    pub fn max(&self) -> f64 {
        self.bracket.max(self.anchor).max(self.antisymmetry)
    }
}

/// Evaluates both compatibility identities at every sample, base derivatives
/// by central differences with relative step `fd_step_rel`.
pub fn verify_compatibility(
    model: &AlgebroidModel,
    samples: &[DVector<f64>],
    fd_step_rel: f64,
) -> Result<CompatibilityReport> {
    let mut report = CompatibilityReport {
        bracket: 0.0,
        anchor: 0.0,
        antisymmetry: 0.0,
    };
    let n = model.base_dim();
    let r = model.rank();
    for x in samples {
        model.check_point(x)?;
        let c = model.structure(x);
        let mu = model.anchor(x);
        let dc: Vec<Tensor3> = (0..n)
            .map(|k| {
                let h = fd_step(fd_step_rel, x[k]);
                Tensor3::from_vec(r, central_partial(|y| model.structure(y).as_slice().to_vec(), x, k, h))
            })
            .collect();
        let dmu: Vec<DMatrix<f64>> = (0..n)
            .map(|k| {
                let h = fd_step(fd_step_rel, x[k]);
                DMatrix::from_column_slice(n, r, &central_partial(|y| model.anchor(y).as_slice().to_vec(), x, k, h))
            })
            .collect();
        let (bracket, anchor) = compatibility_at(&c, Some(&dc), &mu, &dmu);
        report.bracket = report.bracket.max(bracket);
        report.anchor = report.anchor.max(anchor);
        report.antisymmetry = report.antisymmetry.max(antisymmetry_residual(&c));
    }
    Ok(report)
}

fn compatibility_at(
    c: &Tensor3,
    dc: Option<&[Tensor3]>,
    mu: &DMatrix<f64>,
    dmu: &[DMatrix<f64>],
) -> (f64, f64) {
    let r = c.dim();
    let n = mu.nrows();
    let mut bracket = 0.0_f64;
    for e in 0..r {
        for a in 0..r {
            for b in 0..r {
                for cc in 0..r {
                    let mut sum = 0.0;
                    for (i, j, k) in [(a, b, cc), (b, cc, a), (cc, a, b)] {
                        for d in 0..r {
                            sum += c.get(e, i, d) * c.get(d, j, k);
                        }
                        if let Some(dc) = dc {
                            for (l, dcl) in dc.iter().enumerate() {
                                sum += mu[(l, i)] * dcl.get(e, j, k);
                            }
                        }
                    }
                    bracket = bracket.max(sum.abs());
                }
            }
        }
    }
    let mut anchor = 0.0_f64;
    for a in 0..r {
        for b in 0..r {
            for j in 0..n {
                let mut sum = 0.0;
                for (k, dmuk) in dmu.iter().enumerate() {
                    sum += mu[(k, a)] * dmuk[(j, b)] - mu[(k, b)] * dmuk[(j, a)];
                }
                for cc in 0..r {
                    sum -= c.get(cc, a, b) * mu[(j, cc)];
                }
                anchor = anchor.max(sum.abs());
            }
        }
    }
    (bracket, anchor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_tangent_algebroid() {
        let m = build_tangent_algebroid(&RiemannianChart::euclidean(2));
        let x = DVector::from_vec(vec![0.3, -2.0]);
        assert_eq!(m.structure(&x), Tensor3::zeros(2));
        assert_eq!(m.anchor(&x), DMatrix::identity(2, 2));
        assert_eq!(m.metric(&x).unwrap(), DMatrix::identity(2, 2));
    }

    #[test]
    fn sphere_tangent_algebroid_metric() {
        let chart = RiemannianChart::sphere();
        let m = build_tangent_algebroid(&chart);
        let x = DVector::from_vec(vec![0.7, 1.1]);
        let s = 0.7_f64.sin();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, s * s]);
        assert!((m.metric(&x).unwrap() - &expected).amax() < 1e-15);
        assert!((m.metric(&x).unwrap() - chart.metric(&x)).amax() == 0.0);
        assert_eq!(m.anchor(&x), DMatrix::identity(2, 2));
    }

    #[test]
    fn lie_algebras_accepted() {
        let so3 = so3_algebroid();
        assert_eq!(so3.base_dim(), 0);
        assert_eq!(so3.anchor(&DVector::zeros(0)).shape(), (0, 3));
        assert!(build_lie_algebra_algebroid(Tensor3::zeros(2)).is_ok());
    }

    #[test]
    fn non_antisymmetric_constants_rejected() {
        let mut c = Tensor3::zeros(2);
        c.set(1, 0, 1, 1.0);
        assert!(matches!(
            build_lie_algebra_algebroid(c),
            Err(Error::NotAntisymmetric { c: 1, a: 0, b: 1 })
        ));
    }

    #[test]
    fn jacobi_counterexample_rejected() {
        // [σ0, σ1] = σ2, [σ1, σ2] = σ1: the cyclic sum on (0, 1, 2) is -σ2
        let mut c = Tensor3::zeros(3);
        c.set(2, 0, 1, 1.0);
        c.set(2, 1, 0, -1.0);
        c.set(1, 1, 2, 1.0);
        c.set(1, 2, 1, -1.0);
        match build_lie_algebra_algebroid(c) {
            Err(Error::JacobiViolation { residual }) => assert!((residual - 1.0).abs() < 1e-15),
            other => panic!("expected Jacobi violation, got {other:?}"),
        }
    }

    #[test]
    fn shipped_models_are_compatible() {
        let samples: Vec<DVector<f64>> = vec![
            DVector::from_vec(vec![0.3, -0.2, 1.5]),
            DVector::from_vec(vec![-2.0, 0.7, 0.1]),
        ];
        let action = verify_compatibility(&so3_action_algebroid(), &samples, 1e-5).unwrap();
        assert!(action.max() < 1e-6, "{action:?}");
        let so3 = verify_compatibility(&so3_algebroid(), &[DVector::zeros(0)], 1e-5).unwrap();
        assert_eq!(so3.max(), 0.0);
        let sphere = build_tangent_algebroid(&RiemannianChart::sphere());
        let pts = [DVector::from_vec(vec![1.0, 0.5])];
        assert_eq!(verify_compatibility(&sphere, &pts, 1e-5).unwrap().max(), 0.0);
    }

    #[test]
    fn perturbed_so3_detected() {
        let mut c = Tensor3::levi_civita3();
        c.set(2, 0, 1, 1.1);
        let model = AlgebroidModel::new(
            3,
            field(move |_| c.clone()),
            field(|_| DMatrix::zeros(0, 3)),
            ChartDomain::unbounded(0),
        )
        .unwrap();
        let report = verify_compatibility(&model, &[DVector::zeros(0)], 1e-5).unwrap();
        // hand evaluation of the cyclic sum gives exactly 0.1
        assert!((report.bracket - 0.1).abs() < 1e-12);
        assert!(report.bracket > 0.01);
    }

    #[test]
    fn samples_outside_domain_rejected() {
        let m = build_tangent_algebroid(&RiemannianChart::sphere());
        let bad = [DVector::from_vec(vec![-1.0, 0.0])];
        assert!(matches!(verify_compatibility(&m, &bad, 1e-5), Err(Error::OutsideChart { .. })));
    }
}
