//! Lie algebroids in local form: structure functions, anchor, fiber metric,
//! A-connections and the flows they generate.

pub mod connection;
pub mod flow;
pub mod model;

pub use connection::{levi_civita_connection, tangent_levi_civita, AConnection};
pub use flow::{
    el_flow, exp_map, geodesic_flow, legendre_energy, momentum, AlgebroidPath, AlgebroidState,
    PathSample, QuadraticLagrangian, Termination, DEFAULT_STEP,
};
pub use model::{
    antisymmetry_residual, build_lie_algebra_algebroid, build_tangent_algebroid, jacobi_residual,
    so3_action_algebroid, so3_algebroid, verify_compatibility, AlgebroidModel, CompatibilityReport,
};
