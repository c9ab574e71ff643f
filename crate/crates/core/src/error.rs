use thiserror::Error;

use crate::algebroid::AlgebroidState;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("a groupoid needs at least one object")]
    EmptyObjectSet,

    #[error("invalid group table: {0}")]
    InvalidGroupTable(String),

    #[error("malformed groupoid document: {0}")]
    MalformedGroupoid(String),

    #[error("function lives on {found} morphisms but the groupoid has {expected}")]
    GroupoidMismatch { expected: usize, found: usize },

    #[error("action functional is not log-like ({violations} violations, first: {first})")]
    NotLogLike { violations: usize, first: String },

    #[error("invalid probability density: {0}")]
    InvalidDensity(String),

    #[error("potential extraction requires a pair groupoid")]
    NotPairGroupoid,

    #[error("state normalization constant vanishes (|Z| = {0:e})")]
    ZeroNormalization(f64),

    #[error("histories do not match in time: first ends at {end}, second starts at {start}")]
    TimeMismatch { end: f64, start: f64 },

    #[error("histories with different orientations cannot be composed")]
    OrientationMismatch,

    #[error("structure constants are not antisymmetric at C[{c}][{a}][{b}]")]
    NotAntisymmetric { c: usize, a: usize, b: usize },

    #[error("structure constants violate the Jacobi identity (residual {residual:e})")]
    JacobiViolation { residual: f64 },

    #[error("point {point:?} lies outside the chart domain")]
    OutsideChart { point: Vec<f64> },

    #[error("fiber metric is singular or not positive definite at {point:?}")]
    DegenerateMetric { point: Vec<f64> },

    #[error("exponential undefined at this radius: geodesic stopped at s = {reached:.6}")]
    ExpUndefined { reached: f64 },

    #[error("integration blew up at s = {s}")]
    Blowup { s: f64, last: Box<AlgebroidState> },

    #[error(
        "outside solvable neighborhood: shooting stalled after {iterations} iterations \
         (endpoint mismatch {residual:e}, jacobian conditioning {conditioning:e})"
    )]
    LogNotConverged {
        iterations: usize,
        residual: f64,
        conditioning: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
