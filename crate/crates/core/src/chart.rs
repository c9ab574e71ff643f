//! Riemannian charts: a coordinate box with a metric field and, optionally,
//! analytic Christoffel symbols.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric::{field, matrix_partials, ChartDomain, Field, Tensor3, BASE_FD_REL_STEP};

/// Polar margin excluded from the spherical chart.
pub const SPHERE_POLE_MARGIN: f64 = 1e-2;

#[derive(Clone)]
pub struct RiemannianChart {
    name: String,
    dim: usize,
    metric: Field<DMatrix<f64>>,
    christoffel: Option<Field<Tensor3>>,
    domain: ChartDomain,
}

impl fmt::Debug for RiemannianChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RiemannianChart")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("analytic_christoffel", &self.christoffel.is_some())
            .field("domain", &self.domain)
            .finish()
    }
}

impl RiemannianChart {
    pub fn new(
        name: impl Into<String>,
        metric: Field<DMatrix<f64>>,
        domain: ChartDomain,
    ) -> Self {
        Self {
            name: name.into(),
            dim: domain.dim(),
            metric,
            christoffel: None,
            domain,
        }
    }

    /// Attaches analytic Christoffel symbols `Γ^k_ij`, stored as `[k][i][j]`.
    pub fn with_christoffel(mut self, christoffel: Field<Tensor3>) -> Self {
        self.christoffel = Some(christoffel);
        self
    }

    /// Flat `ℝⁿ` in Cartesian coordinates.
    pub fn euclidean(dim: usize) -> Self {
        Self::new(
            format!("euclidean{dim}"),
            field(move |_| DMatrix::identity(dim, dim)),
            ChartDomain::unbounded(dim),
        )
        .with_christoffel(field(move |_| Tensor3::zeros(dim)))
    }

    /// Unit sphere in coordinates `(θ, φ)`, metric `diag(1, sin²θ)`, with a
    /// margin around the poles removed.
    pub fn sphere() -> Self {
        Self::new(
            "sphere",
            field(|x| {
                let s = x[0].sin();
                DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, s * s]))
            }),
            ChartDomain::new(
                vec![SPHERE_POLE_MARGIN, f64::NEG_INFINITY],
                vec![PI - SPHERE_POLE_MARGIN, f64::INFINITY],
            ),
        )
        .with_christoffel(field(|x| {
            let (s, c) = x[0].sin_cos();
            let mut g = Tensor3::zeros(2);
            g.set(0, 1, 1, -s * c);
            g.set(1, 0, 1, c / s);
            g.set(1, 1, 0, c / s);
            g
        }))
    }

    /// Poincaré upper half-plane `(u, v)`, `v > 0`, metric `(du² + dv²) / v²`.
    pub fn hyperbolic() -> Self {
        Self::new(
            "hyperbolic",
            field(|x| DMatrix::identity(2, 2) / (x[1] * x[1])),
            ChartDomain::new(vec![f64::NEG_INFINITY, 1e-6], vec![f64::INFINITY, f64::INFINITY]),
        )
        .with_christoffel(field(|x| {
            let inv = 1.0 / x[1];
            let mut g = Tensor3::zeros(2);
            g.set(0, 0, 1, -inv);
            g.set(0, 1, 0, -inv);
            g.set(1, 0, 0, inv);
            g.set(1, 1, 1, -inv);
            g
        }))
    }

    /// Shipped chart by name; `dim` only matters for `euclidean`.
    pub fn by_name(name: &str, dim: usize) -> Result<Self> {
        match name {
            "euclidean" if (1..=3).contains(&dim) => Ok(Self::euclidean(dim)),
            "euclidean" => Err(Error::InvalidArgument(format!(
                "euclidean charts are shipped for dimensions 1-3, got {dim}"
            ))),
            "sphere" => Ok(Self::sphere()),
            "hyperbolic" => Ok(Self::hyperbolic()),
            other => Err(Error::InvalidArgument(format!("unknown chart {other}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn metric_field(&self) -> &Field<DMatrix<f64>> {
        &self.metric
    }

    pub fn has_analytic_christoffel(&self) -> bool {
        self.christoffel.is_some()
    }

    pub fn metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (self.metric)(x)
    }

    /// Length `sqrt(η_x(v, v))` of a tangent vector at `x`.
    pub fn norm(&self, x: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (v.transpose() * self.metric(x) * v)[(0, 0)].sqrt()
    }

    pub fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::OutsideChart {
                point: x.iter().copied().collect(),
            });
        }
        Ok(())
    }

    /// Christoffel symbols from central differences of the metric,
    /// `Γ^c_ab = ½ η^{cd}(∂_a η_db + ∂_b η_da − ∂_d η_ab)`.
    pub fn christoffel_fd(&self, x: &DVector<f64>) -> Tensor3 {
        let n = self.dim;
        let dg = matrix_partials(&self.metric, x, BASE_FD_REL_STEP);
        let inv = self
            .metric(x)
            .try_inverse()
            .unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN));
        Tensor3::from_fn(n, |c, a, b| {
            0.5 * (0..n)
                .map(|d| inv[(c, d)] * (dg[a][(d, b)] + dg[b][(d, a)] - dg[d][(a, b)]))
                .sum::<f64>()
        })
    }

    /// Analytic Christoffel symbols when attached, finite differences otherwise.
    pub fn christoffel(&self, x: &DVector<f64>) -> Tensor3 {
        match &self.christoffel {
            Some(c) => c(x),
            None => self.christoffel_fd(x),
        }
    }

    /// `∂_k η` for each coordinate `k`. With analytic Christoffel symbols this
    /// uses `∂_k η_ij = Γ^l_ki η_lj + Γ^l_kj η_il`; otherwise central differences.
    pub fn metric_partials(&self, x: &DVector<f64>) -> Vec<DMatrix<f64>> {
        match &self.christoffel {
            Some(c) => {
                let gamma = c(x);
                let eta = self.metric(x);
                let n = self.dim;
                (0..n)
                    .map(|k| {
                        DMatrix::from_fn(n, n, |i, j| {
                            (0..n)
                                .map(|l| gamma.get(l, k, i) * eta[(l, j)] + gamma.get(l, k, j) * eta[(i, l)])
                                .sum()
                        })
                    })
                    .collect()
            }
            None => matrix_partials(&self.metric, x, BASE_FD_REL_STEP),
        }
    }

    /// Largest gap between attached and finite-difference Christoffel symbols.
    pub fn christoffel_consistency(&self, x: &DVector<f64>) -> Option<f64> {
        self.christoffel
            .as_ref()
            .map(|c| c(x).max_abs_diff(&self.christoffel_fd(x)))
    }
}
