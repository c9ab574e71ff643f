//! Finite groupoid convolution algebras, histories of morphisms, Lie algebroid
//! geodesic and Euler-Lagrange flows, and the quadratic expansion of two-point
//! Lagrangians on the pair groupoid of a Riemannian chart.

pub mod action;
pub mod algebra;
pub mod algebroid;
pub mod chart;
pub mod error;
pub mod groupoid;
pub mod histories;
pub mod numeric;
pub mod pair;

pub use error::{Error, Result};
