//! The pair groupoid of a Riemannian chart: exponential and logarithm maps,
//! the two-point energy `ℓ(y, x) = ½ d(x, y)²`, the c-Lagrangian
//! `m c² ℓ(Exp(x, v / c))` and its quadratic expansion at `v = 0`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebroid::{exp_map, tangent_levi_civita, AConnection, DEFAULT_STEP};
use crate::chart::RiemannianChart;
use crate::error::{Error, Result};
use crate::numeric::{is_spd, Field};

/// A chart together with its tangent algebroid and Levi-Civita connection.
#[derive(Clone, Debug)]
pub struct PairGeometry {
    chart: RiemannianChart,
    connection: AConnection,
    step: f64,
    log_options: LogOptions,
}

impl PairGeometry {
    pub fn new(chart: RiemannianChart) -> Result<Self> {
        let connection = tangent_levi_civita(&chart)?;
        Ok(Self {
            chart,
            connection,
            step: DEFAULT_STEP,
            log_options: LogOptions::default(),
        })
    }

    /// Integration step for the geodesic flow behind `Exp`.
    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn with_log_options(mut self, options: LogOptions) -> Self {
        self.log_options = options;
        self
    }

    pub fn chart(&self) -> &RiemannianChart {
        &self.chart
    }

    pub fn connection(&self) -> &AConnection {
        &self.connection
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn log_options(&self) -> &LogOptions {
        &self.log_options
    }

    fn endpoint(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(exp_map(&self.connection, x, v, self.step)?.x)
    }
}

/// A pair-groupoid morphism `(y, x): x → y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairElement {
    pub target: DVector<f64>,
    pub source: DVector<f64>,
}

/// `Exp(x, v) = (exp_x v, x)`.
pub fn riemann_exp(geometry: &PairGeometry, x: &DVector<f64>, v: &DVector<f64>) -> Result<PairElement> {
    geometry.chart.check_point(x)?;
    if v.len() != x.len() {
        return Err(Error::Dimension(format!("velocity has {} components, chart has {}", v.len(), x.len())));
    }
    Ok(PairElement {
        target: geometry.endpoint(x, v)?,
        source: x.clone(),
    })
}

/// Shooting-solver settings for [`riemann_log`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogOptions {
    pub newton_iterations: usize,
    pub descent_iterations: usize,
    /// Endpoint mismatch accepted as converged, in chart coordinates.
    pub tolerance: f64,
    /// Relative step of the forward-difference Jacobian.
    pub jacobian_step: f64,
    /// Solutions whose Jacobian has `σ_min / σ_max` below this are on or
    /// next to the conjugate locus and are rejected.
    pub min_conditioning: f64,
}

impl Default for LogOptions {
    fn default() -> Self {
        Self {
            newton_iterations: 50,
            descent_iterations: 500,
            tolerance: 1e-10,
            jacobian_step: 1e-7,
            min_conditioning: 1e-6,
        }
    }
}

struct Shooter<'a> {
    geometry: &'a PairGeometry,
    x: &'a DVector<f64>,
    y: &'a DVector<f64>,
    options: &'a LogOptions,
}

impl Shooter<'_> {
    fn mismatch(&self, v: &DVector<f64>) -> Option<DVector<f64>> {
        self.geometry.endpoint(self.x, v).ok().map(|end| end - self.y)
    }

    /// Forward-difference Jacobian of the mismatch, reusing `f = F(v)`.
    fn jacobian(&self, v: &DVector<f64>, f: &DVector<f64>) -> Option<DMatrix<f64>> {
        let n = v.len();
        let mut jac = DMatrix::zeros(n, n);
        for k in 0..n {
            let h = self.options.jacobian_step * v[k].abs().max(1.0);
            let mut vp = v.clone();
            vp[k] += h;
            let d = (self.mismatch(&vp)? - f) / h;
            jac.set_column(k, &d);
        }
        Some(jac)
    }

    fn conditioning(jac: &DMatrix<f64>) -> f64 {
        let sv = jac.singular_values();
        let max = sv.max();
        if max > 0.0 {
            sv.min() / max
        } else {
            0.0
        }
    }

    /// Backtracking along `dir` until the mismatch norm decreases.
    fn line_search(
        &self,
        v: &DVector<f64>,
        dir: &DVector<f64>,
        current: f64,
    ) -> Option<(DVector<f64>, DVector<f64>)> {
        let mut lambda = 1.0;
        while lambda > 1e-6 {
            let trial = v + dir * lambda;
            if let Some(f) = self.mismatch(&trial) {
                if f.norm() < current {
                    return Some((trial, f));
                }
            }
            lambda *= 0.5;
        }
        None
    }

    /// Central-difference Jacobian with a coarser step, used to confirm a
    /// near-singular shooting map without forward-difference noise.
    fn central_jacobian(&self, v: &DVector<f64>) -> Option<DMatrix<f64>> {
        let n = v.len();
        let mut jac = DMatrix::zeros(n, n);
        for k in 0..n {
            let h = 1e-5 * v[k].abs().max(1.0);
            let mut vp = v.clone();
            let mut vm = v.clone();
            vp[k] += h;
            vm[k] -= h;
            let d = (self.mismatch(&vp)? - self.mismatch(&vm)?) / (2.0 * h);
            jac.set_column(k, &d);
        }
        Some(jac)
    }

    /// Accepts a converged `v` unless the shooting map is near-singular there.
    /// `jac` is the most recent Newton Jacobian, if any.
    fn accept(
        &self,
        v: DVector<f64>,
        f: &DVector<f64>,
        jac: Option<&DMatrix<f64>>,
        iterations: usize,
    ) -> Result<DVector<f64>> {
        let threshold = self.options.min_conditioning;
        let clear = |j: &DMatrix<f64>| Self::conditioning(j) > 1e3 * threshold;
        if jac.is_some_and(clear) || (jac.is_none() && self.jacobian(&v, f).is_some_and(|j| clear(&j))) {
            return Ok(v);
        }
        let conditioning = self
            .central_jacobian(&v)
            .map(|j| Self::conditioning(&j))
            .unwrap_or(0.0);
        if conditioning < threshold {
            return Err(Error::LogNotConverged {
                iterations,
                residual: f.amax(),
                conditioning,
            });
        }
        Ok(v)
    }

    fn solve(&self) -> Result<DVector<f64>> {
        let opts = self.options;
        let mut v = self.y - self.x;
        let mut f = self.mismatch(&v);
        if f.is_none() {
            // shrink the chart difference until Exp is defined
            let mut scale = 0.5;
            while f.is_none() && scale > 1e-6 {
                v = (self.y - self.x) * scale;
                f = self.mismatch(&v);
                scale *= 0.5;
            }
        }
        let Some(mut f) = f else {
            return Err(Error::LogNotConverged {
                iterations: 0,
                residual: f64::INFINITY,
                conditioning: 0.0,
            });
        };
        let mut iterations = 0;
        let mut conditioning = f64::NAN;
        let mut last_jac: Option<DMatrix<f64>> = None;

        while iterations < opts.newton_iterations {
            if f.amax() < opts.tolerance {
                return self.accept(v, &f, last_jac.as_ref(), iterations);
            }
            iterations += 1;
            let Some(jac) = self.jacobian(&v, &f) else { break };
            conditioning = Self::conditioning(&jac);
            let step = jac.clone().svd(true, true).solve(&(-&f), 1e-14);
            last_jac = Some(jac);
            match step.ok().and_then(|dir| self.line_search(&v, &dir, f.norm())) {
                Some((nv, nf)) => {
                    v = nv;
                    f = nf;
                }
                None => break,
            }
        }
        if f.amax() < opts.tolerance {
            return self.accept(v, &f, last_jac.as_ref(), iterations);
        }

        // damped gradient descent on ½|F|²
        let mut rate = 1.0;
        for _ in 0..opts.descent_iterations {
            if f.amax() < opts.tolerance {
                return self.accept(v, &f, last_jac.as_ref(), iterations);
            }
            iterations += 1;
            let Some(jac) = self.jacobian(&v, &f) else { break };
            conditioning = Self::conditioning(&jac);
            let grad = jac.transpose() * &f;
            last_jac = Some(jac);
            let current = f.norm();
            let mut accepted = false;
            while rate > 1e-12 {
                let trial = &v - &grad * rate;
                if let Some(nf) = self.mismatch(&trial) {
                    if nf.norm() < current {
                        v = trial;
                        f = nf;
                        rate *= 2.0;
                        accepted = true;
                        break;
                    }
                }
                rate *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if f.amax() < opts.tolerance {
            return self.accept(v, &f, last_jac.as_ref(), iterations);
        }
        Err(Error::LogNotConverged {
            iterations,
            residual: f.amax(),
            conditioning,
        })
    }
}

/// Initial velocity `v` with `Exp(x, v) = (y, x)`, found by shooting.
pub fn riemann_log(geometry: &PairGeometry, y: &DVector<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    riemann_log_with(geometry, y, x, &geometry.log_options)
}

pub fn riemann_log_with(
    geometry: &PairGeometry,
    y: &DVector<f64>,
    x: &DVector<f64>,
    options: &LogOptions,
) -> Result<DVector<f64>> {
    geometry.chart.check_point(x)?;
    geometry.chart.check_point(y)?;
    Shooter {
        geometry,
        x,
        y,
        options,
    }
    .solve()
}

/// Canonical two-point function `ℓ(y, x) = ½ |Log(y, x)|²_η(x)`.
pub fn q_lagrangian(geometry: &PairGeometry, y: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
    let v = riemann_log(geometry, y, x)?;
    let n = geometry.chart.norm(x, &v);
    Ok(0.5 * n * n)
}

type TwoPointFn = Arc<dyn Fn(&PairGeometry, &DVector<f64>, &DVector<f64>) -> Result<f64> + Send + Sync>;

/// A two-point function `ℓ(y, x)` on a chart with mass and velocity scale.
#[derive(Clone)]
pub struct TwoPointLagrangian {
    geometry: PairGeometry,
    ell: TwoPointFn,
    pub mass: f64,
    pub c_k: f64,
}

impl fmt::Debug for TwoPointLagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoPointLagrangian")
            .field("chart", &self.geometry.chart.name())
            .field("mass", &self.mass)
            .field("c_k", &self.c_k)
            .finish()
    }
}

impl TwoPointLagrangian {
    pub fn canonical(geometry: PairGeometry, mass: f64, c_k: f64) -> Self {
        Self::custom(geometry, q_lagrangian, mass, c_k)
    }

    pub fn custom<F>(geometry: PairGeometry, ell: F, mass: f64, c_k: f64) -> Self
    where
        F: Fn(&PairGeometry, &DVector<f64>, &DVector<f64>) -> Result<f64> + Send + Sync + 'static,
    {
        Self {
            geometry,
            ell: Arc::new(ell),
            mass,
            c_k,
        }
    }

    /// `ℓ'(y, x) = ℓ(y, x) + h(x) + h(y)`, still symmetric under `(y, x) ↦ (x, y)`.
    pub fn shifted(&self, h: Field<f64>) -> Self {
        let inner = self.ell.clone();
        Self {
            geometry: self.geometry.clone(),
            ell: Arc::new(move |g, y, x| Ok(inner(g, y, x)? + h(x) + h(y))),
            mass: self.mass,
            c_k: self.c_k,
        }
    }

    pub fn geometry(&self) -> &PairGeometry {
        &self.geometry
    }

    pub fn ell(&self, y: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
        (self.ell)(&self.geometry, y, x)
    }
}

/// `𝓛(x, v) = m c² ℓ(Exp(x, v / c))`.
pub fn c_lagrangian(tpl: &TwoPointLagrangian, x: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let pair = riemann_exp(&tpl.geometry, x, &(v / tpl.c_k))?;
    Ok(tpl.mass * tpl.c_k * tpl.c_k * tpl.ell(&pair.target, &pair.source)?)
}

/// Finite-difference steps for [`quadratic_expansion`], relative to `c_K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdOptions {
    pub h1_rel: f64,
    pub h2_rel: f64,
    pub richardson: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            h1_rel: 1e-5,
            h2_rel: 1e-3,
            richardson: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdSteps {
    pub h1: f64,
    pub h2: f64,
    pub richardson: bool,
}

/// Finite-difference consistency: `A` at step `h₁` against `A` at step `h₂`,
/// and (with Richardson extrapolation) `η` at `h₂` against `η` at `h₂ / 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionResiduals {
    pub gradient_step_delta: f64,
    pub hessian_step_delta: Option<f64>,
}

/// `𝓛(x, ξ) ≈ ½ η_ab ξ^a ξ^b + A_a ξ^a − V` at a chart point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionData {
    pub x: Vec<f64>,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub eta: Vec<Vec<f64>>,
    pub regular: bool,
    pub fd_steps: FdSteps,
    pub residuals: ExpansionResiduals,
}

impl ExpansionData {
    pub fn eta_matrix(&self) -> DMatrix<f64> {
        let r = self.eta.len();
        DMatrix::from_fn(r, r, |i, j| self.eta[i][j])
    }

    pub fn a_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.a)
    }

    /// The quadratic model at fiber vector `xi`.
    pub fn evaluate(&self, xi: &DVector<f64>) -> f64 {
        0.5 * (xi.transpose() * self.eta_matrix() * xi)[(0, 0)] + self.a_vector().dot(xi) - self.v
    }
}

fn gradient(l: &impl Fn(&DVector<f64>) -> Result<f64>, r: usize, h: f64) -> Result<DVector<f64>> {
    let mut g = DVector::zeros(r);
    for a in 0..r {
        let mut e = DVector::zeros(r);
        e[a] = h;
        g[a] = (l(&e)? - l(&-&e)?) / (2.0 * h);
    }
    Ok(g)
}

/// Central-difference Hessian at step `h`, together with the central-difference
/// gradient that falls out of the same diagonal samples.
fn hessian(
    l: &impl Fn(&DVector<f64>) -> Result<f64>,
    l0: f64,
    r: usize,
    h: f64,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let unit = |a: usize| {
        let mut e = DVector::zeros(r);
        e[a] = h;
        e
    };
    let mut m = DMatrix::zeros(r, r);
    let mut g = DVector::zeros(r);
    for a in 0..r {
        let ea = unit(a);
        let (plus, minus) = (l(&ea)?, l(&-&ea)?);
        m[(a, a)] = (plus - 2.0 * l0 + minus) / (h * h);
        g[a] = (plus - minus) / (2.0 * h);
        for b in 0..a {
            let eb = unit(b);
            let d = (l(&(&ea + &eb))? - l(&(&ea - &eb))? - l(&(&eb - &ea))? + l(&(-&ea - &eb))?) / (4.0 * h * h);
            m[(a, b)] = d;
            m[(b, a)] = d;
        }
    }
    Ok((m, g))
}

/// Recovers `η`, `A` and `V` from central differences of the c-Lagrangian in
/// the fiber variable at `ξ = 0`. The tangent algebroid has identity anchor, so
/// fiber and chart components coincide.
pub fn quadratic_expansion(tpl: &TwoPointLagrangian, x: &DVector<f64>, options: &FdOptions) -> Result<ExpansionData> {
    if !(options.h1_rel > 0.0 && options.h2_rel > 0.0) {
        return Err(Error::InvalidArgument("finite-difference steps must be positive".into()));
    }
    let r = x.len();
    let l = |xi: &DVector<f64>| c_lagrangian(tpl, x, xi);
    let l0 = l(&DVector::zeros(r))?;
    let h1 = options.h1_rel * tpl.c_k;
    let h2 = options.h2_rel * tpl.c_k;

    let a = gradient(&l, r, h1)?;
    let (eta_h, a_h2) = hessian(&l, l0, r, h2)?;
    let (eta, hessian_step_delta) = if options.richardson {
        let (eta_half, _) = hessian(&l, l0, r, 0.5 * h2)?;
        ((&eta_half * 4.0 - &eta_h) / 3.0, Some((&eta_h - &eta_half).amax()))
    } else {
        (eta_h, None)
    };

    Ok(ExpansionData {
        x: x.iter().copied().collect(),
        v: 0.0 - l0,
        a: a.iter().copied().collect(),
        eta: (0..r).map(|i| (0..r).map(|j| eta[(i, j)]).collect()).collect(),
        regular: is_spd(&eta),
        fd_steps: FdSteps {
            h1,
            h2,
            richardson: options.richardson,
        },
        residuals: ExpansionResiduals {
            gradient_step_delta: (&a - &a_h2).amax(),
            hessian_step_delta,
        },
    })
}

/// One row of a remainder sweep along a fixed direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub l_exact: f64,
    pub l_quadratic: f64,
    pub remainder: f64,
}

/// Compares `𝓛(x, ρ c_K u)` with the expansion for each radius `ρ`, where `u`
/// is `direction` scaled to unit length in the metric at `x`.
pub fn remainder_sweep(
    tpl: &TwoPointLagrangian,
    expansion: &ExpansionData,
    direction: &DVector<f64>,
    radii: &[f64],
) -> Result<Vec<SweepRow>> {
    let x = DVector::from_column_slice(&expansion.x);
    let length = tpl.geometry.chart().norm(&x, direction);
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidArgument("sweep direction must be a nonzero vector".into()));
    }
    let u = direction / length;
    radii
        .iter()
        .map(|&rho| {
            let v = &u * (rho * tpl.c_k);
            let exact = c_lagrangian(tpl, &x, &v)?;
            let quad = expansion.evaluate(&v);
            Ok(SweepRow {
                x: expansion.x.clone(),
                v: v.iter().copied().collect(),
                l_exact: exact,
                l_quadratic: quad,
                remainder: (exact - quad).abs(),
            })
        })
        .collect()
}

/// `n` radii spaced evenly in log scale over `[lo, hi]`.
pub fn log_radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}
