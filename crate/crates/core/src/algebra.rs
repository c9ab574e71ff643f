//! The convolution *-algebra of a finite groupoid, its left-regular matrix
//! representation, positive-type functions and the states they define.

use std::ops::{Add, Mul};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, FunctionDocument};

/// Default tolerance for floating-point equality checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Eigenvalue floor for the positive-type test.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Measure on the morphisms together with its modular function. Only the
/// counting measure is constructible; its modular function is identically one.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    weight: Vec<f64>,
    modular: Vec<f64>,
}

impl Measure {
    pub fn counting(g: &FiniteGroupoid) -> Self {
        let k = g.morphism_count();
        Self {
            weight: vec![1.0; k],
            modular: vec![1.0; k],
        }
    }

    pub fn weight(&self, alpha: usize) -> f64 {
        self.weight[alpha]
    }

    pub fn modular(&self, alpha: usize) -> f64 {
        self.modular[alpha]
    }

    fn check(&self, g: &FiniteGroupoid) -> Result<()> {
        check_len(g, self.weight.len())
    }
}

/// Complex-valued function on the morphisms of a groupoid.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidFunction {
    values: Vec<Complex64>,
}

impl GroupoidFunction {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(g: &FiniteGroupoid) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); g.morphism_count()])
    }

    /// Indicator of the unit morphisms, the identity of the algebra.
    pub fn unit_indicator(g: &FiniteGroupoid) -> Self {
        let mut f = Self::zeros(g);
        for x in 0..g.object_count() {
            f.values[g.unit(x)] = Complex64::new(1.0, 0.0);
        }
        f
    }

    pub fn from_fn(g: &FiniteGroupoid, f: impl FnMut(usize) -> Complex64) -> Self {
        Self::new((0..g.morphism_count()).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, alpha: usize) -> Complex64 {
        self.values[alpha]
    }

    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.values)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.values.iter().map(|v| v * s).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Values laid out as an `n x n` matrix `M[y][x] = f(y, x)` on a pair groupoid.
    pub fn pair_matrix(&self, g: &FiniteGroupoid) -> Result<DMatrix<Complex64>> {
        check_len(g, self.len())?;
        let pair = g.pair_index().ok_or(Error::NotPairGroupoid)?;
        let n = g.object_count();
        Ok(DMatrix::from_fn(n, n, |y, x| self.values[pair[y][x]]))
    }

    pub fn to_document(&self, g: &FiniteGroupoid) -> FunctionDocument {
        self.values
            .iter()
            .enumerate()
            .map(|(a, v)| (g.morphism_id(a).to_string(), [v.re, v.im]))
            .collect()
    }

    /// Reads a function from its id-keyed document. Morphisms that are not
    /// listed take the value zero.
    pub fn from_document(g: &FiniteGroupoid, doc: &FunctionDocument) -> Result<Self> {
        let mut f = Self::zeros(g);
        for (id, [re, im]) in doc {
            let alpha = (0..g.morphism_count())
                .find(|&a| g.morphism_id(a) == id)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown morphism id {id}")))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite value at {id}")));
            }
            f.values[alpha] = Complex64::new(*re, *im);
        }
        Ok(f)
    }
}

impl Add for &GroupoidFunction {
    type Output = GroupoidFunction;

    fn add(self, rhs: &GroupoidFunction) -> GroupoidFunction {
        assert_eq!(self.len(), rhs.len(), "functions on different groupoids");
        GroupoidFunction::new(self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect())
    }
}

impl Mul<Complex64> for &GroupoidFunction {
    type Output = GroupoidFunction;

    fn mul(self, rhs: Complex64) -> GroupoidFunction {
        self.scale(rhs)
    }
}

fn check_len(g: &FiniteGroupoid, found: usize) -> Result<()> {
    let expected = g.morphism_count();
    if found != expected {
        return Err(Error::GroupoidMismatch { expected, found });
    }
    Ok(())
}

/// `(f ⋆ g)(α) = Σ_{γ : t(γ) = t(α)} f(γ) g(γ⁻¹ ∘ α) ν(γ)`.
pub fn convolve(
    g: &FiniteGroupoid,
    nu: &Measure,
    f: &GroupoidFunction,
    h: &GroupoidFunction,
) -> Result<GroupoidFunction> {
    nu.check(g)?;
    check_len(g, f.len())?;
    check_len(g, h.len())?;
    let values = (0..g.morphism_count())
        .map(|alpha| {
            g.with_target(g.target(alpha))
                .iter()
                .map(|&gamma| {
                    let rest = g
                        .compose(g.inverse(gamma), alpha)
                        .expect("γ⁻¹ ∘ α is composable when t(γ) = t(α)");
                    f.get(gamma) * h.get(rest) * nu.weight(gamma)
                })
                .sum()
        })
        .collect();
    Ok(GroupoidFunction::new(values))
}

/// `f*(α) = conj(f(α⁻¹)) Δ(α⁻¹)`.
pub fn involution(
    g: &FiniteGroupoid,
    nu: &Measure,
    f: &GroupoidFunction,
) -> Result<GroupoidFunction> {
    nu.check(g)?;
    check_len(g, f.len())?;
    Ok(GroupoidFunction::from_fn(g, |alpha| {
        let inv = g.inverse(alpha);
        f.get(inv).conj() * nu.modular(inv)
    }))
}

/// Matrix of `ψ ↦ (Δ^{1/2} f) ⋆ ψ` on `ℂ^K`.
pub fn convolution_operator(
    g: &FiniteGroupoid,
    nu: &Measure,
    f: &GroupoidFunction,
) -> Result<DMatrix<Complex64>> {
    nu.check(g)?;
    check_len(g, f.len())?;
    let k = g.morphism_count();
    let mut m = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
    for alpha in 0..k {
        for &gamma in g.with_target(g.target(alpha)) {
            let col = g
                .compose(g.inverse(gamma), alpha)
                .expect("γ⁻¹ ∘ α is composable when t(γ) = t(α)");
            m[(alpha, col)] += f.get(gamma) * nu.modular(gamma).sqrt() * nu.weight(gamma);
        }
    }
    Ok(m)
}

/// Matrix `Q` with `f† Q f = Σ_α (f* ⋆ f)(α) φ(α) ν(α)` for every `f`.
pub fn positivity_form(
    g: &FiniteGroupoid,
    nu: &Measure,
    phi: &GroupoidFunction,
) -> Result<DMatrix<Complex64>> {
    nu.check(g)?;
    check_len(g, phi.len())?;
    let k = g.morphism_count();
    let mut q = DMatrix::from_element(k, k, Complex64::new(0.0, 0.0));
    // (f*⋆f)(α) = Σ_γ conj(f(γ⁻¹)) Δ(γ⁻¹) f(γ⁻¹∘α) ν(γ)
    for alpha in 0..k {
        let outer = phi.get(alpha) * nu.weight(alpha);
        for &gamma in g.with_target(g.target(alpha)) {
            let row = g.inverse(gamma);
            let col = g
                .compose(row, alpha)
                .expect("γ⁻¹ ∘ α is composable when t(γ) = t(α)");
            q[(row, col)] += outer * nu.modular(row) * nu.weight(gamma);
        }
    }
    Ok(q)
}

/// Outcome of the positive-type test on a form matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    /// Eigenvalues of the Hermitian part, ascending.
    pub eigenvalues: Vec<f64>,
    /// `max |Q - Q†|`; a non-Hermitian form cannot be nonnegative.
    pub hermitian_defect: f64,
    pub tolerance: f64,
}

impl PositivityReport {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.hermitian_defect <= self.tolerance && self.min_eigenvalue() >= -self.tolerance
    }

    /// Number of eigenvalues above the tolerance.
    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&e| e > self.tolerance).count()
    }
}

pub fn positivity_report(q: &DMatrix<Complex64>, tolerance: f64) -> PositivityReport {
    let adjoint = q.adjoint();
    let hermitian_defect = (q - &adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let hermitian = (q + adjoint).scale(0.5);
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(hermitian).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    PositivityReport {
        eigenvalues,
        hermitian_defect,
        tolerance,
    }
}

/// Positive-type test of `φ` at the default tolerance.
pub fn check_positive_type(
    g: &FiniteGroupoid,
    nu: &Measure,
    phi: &GroupoidFunction,
) -> Result<PositivityReport> {
    Ok(positivity_report(&positivity_form(g, nu, phi)?, POSITIVITY_TOLERANCE))
}

/// The linear functional `ρ_φ(f) = Σ_α f(α) φ(α) ν(α)`.
#[derive(Debug, Clone)]
pub struct State<'a> {
    groupoid: &'a FiniteGroupoid,
    measure: &'a Measure,
    phi: &'a GroupoidFunction,
    normalization: Complex64,
}

impl<'a> State<'a> {
    pub fn new(
        groupoid: &'a FiniteGroupoid,
        measure: &'a Measure,
        phi: &'a GroupoidFunction,
    ) -> Result<Self> {
        measure.check(groupoid)?;
        check_len(groupoid, phi.len())?;
        let normalization = (0..groupoid.morphism_count())
            .map(|a| phi.get(a) * measure.weight(a))
            .sum();
        Ok(Self {
            groupoid,
            measure,
            phi,
            normalization,
        })
    }

    /// `Z = Σ_α φ(α) ν(α)`.
    pub fn normalization(&self) -> Complex64 {
        self.normalization
    }

    pub fn evaluate(&self, f: &GroupoidFunction) -> Result<Complex64> {
        check_len(self.groupoid, f.len())?;
        Ok((0..f.len())
            .map(|a| f.get(a) * self.phi.get(a) * self.measure.weight(a))
            .sum())
    }

    /// `ρ(f) / Z`; fails when `|Z|` is below `tolerance`.
    pub fn evaluate_normalized(&self, f: &GroupoidFunction, tolerance: f64) -> Result<Complex64> {
        let z = self.normalization;
        if z.norm() <= tolerance {
            return Err(Error::ZeroNormalization(z.norm()));
        }
        Ok(self.evaluate(f)? / z)
    }
}

/// Convenience wrapper for a single evaluation.
pub fn state_evaluate(
    g: &FiniteGroupoid,
    nu: &Measure,
    phi: &GroupoidFunction,
    f: &GroupoidFunction,
) -> Result<Complex64> {
    State::new(g, nu, phi)?.evaluate(f)
}
