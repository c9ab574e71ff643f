//! Small numerical kernels shared by the geometric modules: rank-3 coefficient
//! arrays, chart boxes, central differences and a fixed-step RK4 stepper.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

/// A smooth field over a chart, evaluated pointwise.
pub type Field<T> = Arc<dyn Fn(&DVector<f64>) -> T + Send + Sync>;

/// Wraps a closure as a [`Field`].
pub fn field<T, F>(f: F) -> Field<T>
where
    F: Fn(&DVector<f64>) -> T + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Coefficients `T^c_ab` with one upper and two lower fiber indices, stored
/// as `data[(c * r + a) * r + b]`.
#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        for c in 0..dim {
            for a in 0..dim {
                for b in 0..dim {
                    t.set(c, a, b, f(c, a, b));
                }
            }
        }
        t
    }

    /// The Levi-Civita symbol in three dimensions, `eps[c][a][b] = ε_abc`.
    pub fn levi_civita3() -> Self {
        Self::from_fn(3, |c, a, b| permutation_sign(a, b, c))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, c: usize, a: usize, b: usize) -> f64 {
        self.data[(c * self.dim + a) * self.dim + b]
    }

    #[inline]
    pub fn set(&mut self, c: usize, a: usize, b: usize, v: f64) {
        self.data[(c * self.dim + a) * self.dim + b] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim * dim, "tensor storage has wrong length");
        Self { dim, data }
    }

    /// Contraction `T^c_ab u^a w^b` as a vector indexed by `c`.
    pub fn contract(&self, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let r = self.dim;
        DVector::from_fn(r, |c, _| {
            let mut acc = 0.0;
            for a in 0..r {
                for b in 0..r {
                    acc += self.get(c, a, b) * u[a] * w[b];
                }
            }
            acc
        })
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor3")
            .field("dim", &self.dim)
            .field("data", &self.data)
            .finish()
    }
}

fn permutation_sign(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Axis-aligned box in chart coordinates. Infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ChartDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        Self { lower, upper }
    }

    pub fn unbounded(dim: usize) -> Self {
        Self::new(vec![f64::NEG_INFINITY; dim], vec![f64::INFINITY; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// A representative interior point: the midpoint of finite sides, one unit
    /// inside half-infinite sides, zero otherwise.
    pub fn reference_point(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.lower.iter().zip(&self.upper).map(|(&lo, &hi)| match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + 1.0,
                (false, true) => hi - 1.0,
                (false, false) => 0.0,
            }),
        )
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.contains_coords(x.as_slice())
    }

    pub fn contains_coords(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| v.is_finite() && *v >= *lo && *v <= *hi)
    }
}

/// Step used for base-coordinate derivatives: `rel * max(1, |x_k|)`.
#[inline]
pub fn fd_step(rel: f64, xk: f64) -> f64 {
    rel * xk.abs().max(1.0)
}

/// Default relative step for base-coordinate central differences.
pub const BASE_FD_REL_STEP: f64 = 1e-5;

/// Central difference of a vector-valued map along coordinate `k`.
pub fn central_partial<F>(f: F, x: &DVector<f64>, k: usize, h: f64) -> Vec<f64>
where
    F: Fn(&DVector<f64>) -> Vec<f64>,
{
    let mut xp = x.clone();
    let mut xm = x.clone();
    xp[k] += h;
    xm[k] -= h;
    let fp = f(&xp);
    let fm = f(&xm);
    fp.iter().zip(&fm).map(|(p, m)| (p - m) / (2.0 * h)).collect()
}

/// Central-difference gradient of a scalar map.
pub fn central_gradient<F>(f: F, x: &DVector<f64>, rel: f64) -> DVector<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    DVector::from_fn(x.len(), |k, _| {
        let h = fd_step(rel, x[k]);
        central_partial(|y| vec![f(y)], x, k, h)[0]
    })
}

/// Partial derivatives `∂_k M(x)` of a matrix field, one matrix per coordinate.
pub fn matrix_partials(m: &Field<DMatrix<f64>>, x: &DVector<f64>, rel: f64) -> Vec<DMatrix<f64>> {
    (0..x.len())
        .map(|k| {
            let h = fd_step(rel, x[k]);
            let probe = m(x);
            let (nr, nc) = probe.shape();
            let d = central_partial(|y| m(y).as_slice().to_vec(), x, k, h);
            DMatrix::from_column_slice(nr, nc, &d)
        })
        .collect()
}

/// One classical four-stage Runge-Kutta step for an autonomous system whose
/// right-hand side may fail.
pub fn rk4_step<E, F>(f: &F, y: &DVector<f64>, h: f64) -> Result<DVector<f64>, E>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>, E>,
{
    let k1 = f(y)?;
    let k2 = f(&(y + &k1 * (0.5 * h)))?;
    let k3 = f(&(y + &k2 * (0.5 * h)))?;
    let k4 = f(&(y + &k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// The same step computed in place: `y` is advanced and `work` is scratch
/// space of the same length. On error `y` is left untouched.
pub fn rk4_step_in_place<E, F>(f: &F, y: &mut DVector<f64>, h: f64, work: &mut DVector<f64>) -> Result<(), E>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>, E>,
{
    let k1 = f(y)?;
    work.copy_from(y);
    work.axpy(0.5 * h, &k1, 1.0);
    let k2 = f(work)?;
    work.copy_from(y);
    work.axpy(0.5 * h, &k2, 1.0);
    let k3 = f(work)?;
    work.copy_from(y);
    work.axpy(h, &k3, 1.0);
    let k4 = f(work)?;
    y.axpy(h / 6.0, &k1, 1.0);
    y.axpy(h / 3.0, &k2, 1.0);
    y.axpy(h / 3.0, &k3, 1.0);
    y.axpy(h / 6.0, &k4, 1.0);
    Ok(())
}

/// Splits `[0, span]` into steps of length `step`, shortening the last one.
pub fn step_schedule(span: f64, step: f64) -> Vec<f64> {
    let full = (span / step).floor() as usize;
    let mut steps = vec![step; full];
    let rest = span - full as f64 * step;
    if rest > step * 1e-9 {
        steps.push(rest);
    }
    steps
}

/// Inverse of a symmetric positive definite matrix via Cholesky, `None` when
/// the matrix is not SPD.
pub fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    m.clone().cholesky().map(|c| c.inverse())
}

pub fn is_spd(m: &DMatrix<f64>) -> bool {
    m.nrows() == 0 || (symmetry_defect(m) <= 1e-12 * (1.0 + m.amax()) && m.clone().cholesky().is_some())
}

pub fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
