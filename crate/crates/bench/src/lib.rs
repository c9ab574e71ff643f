//! Fixtures shared by the criterion benchmarks in `benches/`.

use lagroid_core::algebra::GroupoidFunction;
use lagroid_core::chart::RiemannianChart;
use lagroid_core::groupoid::{build_pair_groupoid, FiniteGroupoid};
use lagroid_core::pair::PairGeometry;
use nalgebra::DVector;
use num_complex::Complex64;

/// Pair groupoid on `n` objects with a deterministic dense function on it.
pub fn pair_fixture(n: usize) -> (FiniteGroupoid, GroupoidFunction) {
    let g = build_pair_groupoid(n).expect("n > 0");
    let f = GroupoidFunction::from_fn(&g, |a| {
        let t = a as f64;
        Complex64::new((0.7 * t).sin(), (1.3 * t).cos())
    });
    (g, f)
}

pub fn sphere() -> PairGeometry {
    PairGeometry::new(RiemannianChart::sphere()).expect("sphere chart has a metric")
}

pub fn point(coords: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(coords)
}
