use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::connection::AConnection;
use super::model::AlgebroidModel;
use crate::error::{Error, Result};
use crate::numeric::{
    central_gradient, fd_step, field, matrix_partials, rk4_step_in_place, step_schedule, Field,
    BASE_FD_REL_STEP,
};

/// Default integration step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// A base point together with fiber coordinates `ξ^a`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebroidState {
    pub x: DVector<f64>,
    pub xi: DVector<f64>,
}

impl AlgebroidState {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Self {
        Self {
            x: DVector::from_vec(x),
            xi: DVector::from_vec(xi),
        }
    }

    fn is_finite(&self) -> bool {
        self.x.iter().chain(self.xi.iter()).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub s: f64,
    pub state: AlgebroidState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// The base point left the chart after the step ending at `s`.
    ChartExit { s: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebroidPath {
    pub samples: Vec<PathSample>,
    pub step: f64,
    pub termination: Termination,
}

impl AlgebroidPath {
    pub fn last(&self) -> &PathSample {
        self.samples.last().expect("a path always holds its initial sample")
    }

    /// Sample whose parameter is closest to `s`.
    pub fn nearest(&self, s: f64) -> &PathSample {
        self.samples
            .iter()
            .min_by(|a, b| (a.s - s).abs().total_cmp(&(b.s - s).abs()))
            .expect("a path always holds its initial sample")
    }
}

fn check_run(model: &AlgebroidModel, init: &AlgebroidState, span: f64, step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if !(span >= 0.0 && span.is_finite()) {
        return Err(Error::InvalidArgument(format!("span must be nonnegative, got {span}")));
    }
    if init.x.len() != model.base_dim() || init.xi.len() != model.rank() {
        return Err(Error::Dimension(format!(
            "state has base {} / fiber {}, model has {} / {}",
            init.x.len(),
            init.xi.len(),
            model.base_dim(),
            model.rank()
        )));
    }
    model.check_point(&init.x)
}

fn split(y: &DVector<f64>, n: usize, r: usize) -> (DVector<f64>, DVector<f64>) {
    (y.rows(0, n).into_owned(), y.rows(n, r).into_owned())
}

fn join(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Right-hand side `(μ ξ, −Γ(ξ, ξ))` of the geodesic equation on `(x, ξ)`.
fn geodesic_rhs(conn: &AConnection, y: &DVector<f64>) -> Result<DVector<f64>> {
    let model = conn.model();
    let (n, r) = (model.base_dim(), model.rank());
    let x = y.rows(0, n).into_owned();
    let xi = y.rows(n, r);
    let gamma = conn.coefficients(&x)?;
    let mu = model.anchor(&x);
    let mut out = DVector::zeros(n + r);
    for k in 0..n {
        out[k] = (0..r).map(|a| mu[(k, a)] * xi[a]).sum();
    }
    for c in 0..r {
        let mut acc = 0.0;
        for a in 0..r {
            for b in 0..r {
                acc += gamma.get(c, a, b) * xi[a] * xi[b];
            }
        }
        out[n + c] = -acc;
    }
    Ok(out)
}

/// Integrates `dξ^a/ds = −Γ^a_bc ξ^b ξ^c`, `dx^k/ds = μ^k_a ξ^a` with
/// fixed-step RK4.
pub fn geodesic_flow(
    conn: &AConnection,
    init: &AlgebroidState,
    s_max: f64,
    step: f64,
) -> Result<AlgebroidPath> {
    run_geodesic(conn, init, s_max, step, true)
}

fn run_geodesic(
    conn: &AConnection,
    init: &AlgebroidState,
    s_max: f64,
    step: f64,
    record: bool,
) -> Result<AlgebroidPath> {
    let model = conn.model();
    check_run(model, init, s_max, step)?;
    let (n, r) = (model.base_dim(), model.rank());
    let stepper = Stepper {
        model,
        span: s_max,
        step,
        record,
    };
    stepper.run(
        init.clone(),
        join(&init.x, &init.xi),
        |y| geodesic_rhs(conn, y),
        |y| {
            let (x, xi) = split(y, n, r);
            Ok(AlgebroidState { x, xi })
        },
    )
}

/// Shared fixed-step loop. Without `record` only the initial and final
/// samples are kept.
struct Stepper<'a> {
    model: &'a AlgebroidModel,
    span: f64,
    step: f64,
    record: bool,
}

impl Stepper<'_> {
    fn run<F, D>(&self, init: AlgebroidState, mut y: DVector<f64>, rhs: F, decode: D) -> Result<AlgebroidPath>
    where
        F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
        D: Fn(&DVector<f64>) -> Result<AlgebroidState>,
    {
        let n = self.model.base_dim();
        let mut work = y.clone();
        let mut prev = y.clone();
        let mut s = 0.0;
        let mut samples = vec![PathSample { s, state: init }];
        let finish = |samples: &mut Vec<PathSample>, s: f64, y: &DVector<f64>, record: bool| -> Result<()> {
            if !record {
                samples.push(PathSample { s, state: decode(y)? });
            }
            Ok(())
        };
        for h in step_schedule(self.span, self.step) {
            prev.copy_from(&y);
            rk4_step_in_place(&rhs, &mut y, h, &mut work)?;
            s += h;
            if !y.iter().all(|c| c.is_finite()) {
                return Err(Error::Blowup {
                    s,
                    last: Box::new(decode(&prev)?),
                });
            }
            if self.record {
                let state = decode(&y)?;
                if !state.is_finite() {
                    return Err(Error::Blowup {
                        s,
                        last: Box::new(decode(&prev)?),
                    });
                }
                samples.push(PathSample { s, state });
            }
            if !self.model.domain().contains_coords(&y.as_slice()[..n]) {
                finish(&mut samples, s, &y, self.record)?;
                return Ok(AlgebroidPath {
                    samples,
                    step: self.step,
                    termination: Termination::ChartExit { s },
                });
            }
        }
        if s > 0.0 {
            finish(&mut samples, s, &y, self.record)?;
        }
        Ok(AlgebroidPath {
            samples,
            step: self.step,
            termination: Termination::Completed,
        })
    }
}

/// `Exp(x, ξ)`: the endpoint at `s = 1` of the geodesic with initial fiber
/// vector `ξ`.
pub fn exp_map(
    conn: &AConnection,
    x: &DVector<f64>,
    xi: &DVector<f64>,
    step: f64,
) -> Result<AlgebroidState> {
    let init = AlgebroidState {
        x: x.clone(),
        xi: xi.clone(),
    };
    match run_geodesic(conn, &init, 1.0, step, false) {
        Ok(path) => match path.termination {
            Termination::Completed => Ok(path.last().state.clone()),
            Termination::ChartExit { s } => Err(Error::ExpUndefined { reached: s }),
        },
        Err(Error::Blowup { s, .. }) => Err(Error::ExpUndefined { reached: s }),
        Err(e) => Err(e),
    }
}

/// `L(x, ξ) = ½ η_ab(x) ξ^a ξ^b + A_a(x) ξ^a − V(x)`.
#[derive(Clone)]
pub struct QuadraticLagrangian {
    pub eta: Field<DMatrix<f64>>,
    pub a: Field<DVector<f64>>,
    pub v: Field<f64>,
    pub mass: f64,
    pub c_k: f64,
    eta_partials: Option<Field<Vec<DMatrix<f64>>>>,
    /// `(k, b) = ∂_k A_b`.
    a_jacobian: Option<Field<DMatrix<f64>>>,
    v_gradient: Option<Field<DVector<f64>>>,
}

impl fmt::Debug for QuadraticLagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadraticLagrangian")
            .field("mass", &self.mass)
            .field("c_k", &self.c_k)
            .finish()
    }
}

impl QuadraticLagrangian {
    pub fn new(eta: Field<DMatrix<f64>>, a: Field<DVector<f64>>, v: Field<f64>) -> Self {
        Self {
            eta,
            a,
            v,
            mass: 1.0,
            c_k: 1.0,
            eta_partials: None,
            a_jacobian: None,
            v_gradient: None,
        }
    }

    /// Pure kinetic term `½ η ξ ξ` of rank `r`.
    pub fn kinetic(eta: Field<DMatrix<f64>>, rank: usize) -> Self {
        Self::new(eta, field(move |_| DVector::zeros(rank)), field(|_| 0.0))
    }

    pub fn with_scales(mut self, mass: f64, c_k: f64) -> Self {
        self.mass = mass;
        self.c_k = c_k;
        self
    }

    pub fn with_eta_partials(mut self, f: Field<Vec<DMatrix<f64>>>) -> Self {
        self.eta_partials = Some(f);
        self
    }

    pub fn with_a_jacobian(mut self, f: Field<DMatrix<f64>>) -> Self {
        self.a_jacobian = Some(f);
        self
    }

    pub fn with_v_gradient(mut self, f: Field<DVector<f64>>) -> Self {
        self.v_gradient = Some(f);
        self
    }

    pub fn evaluate(&self, state: &AlgebroidState) -> f64 {
        let eta = (self.eta)(&state.x);
        0.5 * (state.xi.transpose() * eta * &state.xi)[(0, 0)] + (self.a)(&state.x).dot(&state.xi)
            - (self.v)(&state.x)
    }

    fn eta_partials(&self, x: &DVector<f64>) -> Vec<DMatrix<f64>> {
        match &self.eta_partials {
            Some(f) => f(x),
            None => matrix_partials(&self.eta, x, BASE_FD_REL_STEP),
        }
    }

    fn a_jacobian(&self, x: &DVector<f64>, rank: usize) -> DMatrix<f64> {
        match &self.a_jacobian {
            Some(f) => f(x),
            None => {
                let n = x.len();
                let mut jac = DMatrix::zeros(n, rank);
                for k in 0..n {
                    let h = fd_step(BASE_FD_REL_STEP, x[k]);
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[k] += h;
                    xm[k] -= h;
                    let d = ((self.a)(&xp) - (self.a)(&xm)) / (2.0 * h);
                    jac.row_mut(k).copy_from(&d.transpose());
                }
                jac
            }
        }
    }

    fn v_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.v_gradient {
            Some(f) => f(x),
            None => central_gradient(|y| (self.v)(y), x, BASE_FD_REL_STEP),
        }
    }

    /// `ξ = η⁻¹(p − A)`.
    fn velocity(&self, x: &DVector<f64>, p: &DVector<f64>) -> Result<DVector<f64>> {
        let eta = (self.eta)(x);
        if eta.nrows() == 0 {
            return Ok(DVector::zeros(0));
        }
        let chol = eta.cholesky().ok_or_else(|| Error::DegenerateMetric {
            point: x.iter().copied().collect(),
        })?;
        Ok(chol.solve(&(p - (self.a)(x))))
    }
}

/// `E = ½ η_ab ξ^a ξ^b + V(x)`.
pub fn legendre_energy(lagrangian: &QuadraticLagrangian, state: &AlgebroidState) -> f64 {
    let eta = (lagrangian.eta)(&state.x);
    0.5 * (state.xi.transpose() * eta * &state.xi)[(0, 0)] + (lagrangian.v)(&state.x)
}

/// Fiber momentum `p_a = η_ab ξ^b + A_a`.
pub fn momentum(lagrangian: &QuadraticLagrangian, state: &AlgebroidState) -> DVector<f64> {
    (lagrangian.eta)(&state.x) * &state.xi + (lagrangian.a)(&state.x)
}

/// Euler-Lagrange flow of a quadratic Lagrangian on an algebroid, integrated
/// in momentum form:
///
/// `dp_a/dt = −p_c C^c_ab ξ^b + μ^k_a (½ ∂_k η_bc ξ^b ξ^c + ∂_k A_b ξ^b − ∂_k V)`,
/// `dx^k/dt = μ^k_a ξ^a`.
pub fn el_flow(
    lagrangian: &QuadraticLagrangian,
    model: &AlgebroidModel,
    init: &AlgebroidState,
    t_max: f64,
    step: f64,
) -> Result<AlgebroidPath> {
    check_run(model, init, t_max, step)?;
    let (n, r) = (model.base_dim(), model.rank());
    let rhs = |y: &DVector<f64>| -> Result<DVector<f64>> {
        let (x, p) = split(y, n, r);
        let xi = lagrangian.velocity(&x, &p)?;
        let c = model.structure(&x);
        let mu = model.anchor(&x);
        let mut dp = DVector::zeros(r);
        for a in 0..r {
            let mut acc = 0.0;
            for cc in 0..r {
                for b in 0..r {
                    acc -= p[cc] * c.get(cc, a, b) * xi[b];
                }
            }
            dp[a] = acc;
        }
        if n > 0 {
            let d_eta = lagrangian.eta_partials(&x);
            let d_a = lagrangian.a_jacobian(&x, r);
            let d_v = lagrangian.v_gradient(&x);
            let force = DVector::from_fn(n, |k, _| {
                0.5 * (xi.transpose() * &d_eta[k] * &xi)[(0, 0)] + d_a.row(k).dot(&xi.transpose())
                    - d_v[k]
            });
            dp += mu.transpose() * force;
        }
        Ok(join(&(mu * xi), &dp))
    };
    Stepper {
        model,
        span: t_max,
        step,
        record: true,
    }
    .run(init.clone(), join(&init.x, &momentum(lagrangian, init)), rhs, |y| {
        let (x, p) = split(y, n, r);
        let xi = lagrangian.velocity(&x, &p)?;
        Ok(AlgebroidState { x, xi })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::connection::levi_civita_connection;
    use crate::algebroid::model::{build_tangent_algebroid, so3_algebroid};
    use crate::chart::RiemannianChart;

    #[test]
    fn euclidean_geodesic_is_a_line() {
        let conn = levi_civita_connection(&build_tangent_algebroid(&RiemannianChart::euclidean(2))).unwrap();
        let init = AlgebroidState::new(vec![0.5, -1.0], vec![0.3, 0.7]);
        let path = geodesic_flow(&conn, &init, 1.0, 1e-3).unwrap();
        assert_eq!(path.termination, Termination::Completed);
        for sample in &path.samples {
            let expected = &init.x + &init.xi * sample.s;
            assert!((&sample.state.x - expected).amax() < 1e-12);
            assert!((&sample.state.xi - &init.xi).amax() < 1e-15);
        }
    }

    #[test]
    fn bi_invariant_so3_geodesic_keeps_xi() {
        let model = so3_algebroid().with_metric(field(|_| DMatrix::identity(3, 3)));
        let conn = levi_civita_connection(&model).unwrap();
        let init = AlgebroidState::new(vec![], vec![0.2, -1.0, 0.4]);
        let path = geodesic_flow(&conn, &init, 2.0, 1e-2).unwrap();
        assert!((&path.last().state.xi - &init.xi).amax() < 1e-15);
    }

    #[test]
    fn exp_of_zero_is_unit() {
        let conn = levi_civita_connection(&build_tangent_algebroid(&RiemannianChart::sphere())).unwrap();
        let x = DVector::from_vec(vec![1.0, 0.2]);
        let end = exp_map(&conn, &x, &DVector::zeros(2), DEFAULT_STEP).unwrap();
        assert_eq!(end.x, x);
        assert_eq!(end.xi, DVector::zeros(2));
    }

    #[test]
    fn exp_past_the_pole_is_undefined() {
        let conn = levi_civita_connection(&build_tangent_algebroid(&RiemannianChart::sphere())).unwrap();
        let x = DVector::from_vec(vec![0.5, 0.0]);
        let err = exp_map(&conn, &x, &DVector::from_vec(vec![-2.0, 0.0]), DEFAULT_STEP).unwrap_err();
        match err {
            Error::ExpUndefined { reached } => assert!(reached < 0.26 && reached > 0.2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_runs_rejected() {
        let conn = levi_civita_connection(&build_tangent_algebroid(&RiemannianChart::euclidean(2))).unwrap();
        let init = AlgebroidState::new(vec![0.0, 0.0], vec![1.0, 0.0]);
        assert!(geodesic_flow(&conn, &init, 1.0, 0.0).is_err());
        let bad = AlgebroidState::new(vec![0.0], vec![1.0, 0.0]);
        assert!(matches!(geodesic_flow(&conn, &bad, 1.0, 0.1), Err(Error::Dimension(_))));
    }

    #[test]
    fn blowup_reports_last_sample() {
        // Γ^0_00 = -1 gives ξ' = ξ², which blows up at s = 1/ξ(0)
        let model = build_tangent_algebroid(&RiemannianChart::euclidean(1));
        let conn = AConnection::new(model, |_| Ok(crate::numeric::Tensor3::from_vec(1, vec![-1.0])));
        let init = AlgebroidState::new(vec![0.0], vec![10.0]);
        match geodesic_flow(&conn, &init, 1.0, 0.05) {
            Err(Error::Blowup { s, last }) => {
                assert!(s > 0.05 && s < 0.5);
                assert!(last.xi[0].is_finite());
            }
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn straight_line_motion_for_constant_metric() {
        let model = build_tangent_algebroid(&RiemannianChart::euclidean(2));
        let eta = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let lag = QuadraticLagrangian::kinetic(field(move |_| eta.clone()), 2);
        let init = AlgebroidState::new(vec![1.0, 2.0], vec![-0.4, 0.9]);
        let path = el_flow(&lag, &model, &init, 3.0, 1e-2).unwrap();
        let end = &path.last();
        assert!((&end.state.x - (&init.x + &init.xi * 3.0)).amax() < 1e-12);
        assert!((&end.state.xi - &init.xi).amax() < 1e-13);
    }

    #[test]
    fn energy_at_rest_is_potential() {
        let lag = QuadraticLagrangian::new(
            field(|_| DMatrix::identity(2, 2)),
            field(|x| DVector::from_vec(vec![x[1], -x[0]])),
            field(|x| 3.0 + x[0]),
        );
        let state = AlgebroidState::new(vec![2.0, 1.0], vec![0.0, 0.0]);
        assert_eq!(legendre_energy(&lag, &state), 5.0);
    }

    #[test]
    fn singular_metric_fails_el_flow() {
        let model = build_tangent_algebroid(&RiemannianChart::euclidean(1));
        let lag = QuadraticLagrangian::kinetic(field(|x| DMatrix::from_element(1, 1, 1.0 - x[0])), 1);
        let init = AlgebroidState::new(vec![0.0], vec![1.0]);
        assert!(matches!(
            el_flow(&lag, &model, &init, 2.0, 1e-2),
            Err(Error::DegenerateMetric { .. }) | Err(Error::Blowup { .. })
        ));
    }
}
