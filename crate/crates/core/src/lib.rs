//! Numerical laboratory for finite-time blow-up of
//! `i u_t + Δu = λ |u|^α u` with complex `λ`: the explicit blow-up profile,
//! admissibility and exponent calculus, a split-step solver with a-priori
//! diagnostics, and the backward Cauchy-problem study that measures how
//! solutions started on the profile stay close to it.

pub mod error;
pub mod field;
pub mod grid;
pub mod params;
pub mod profile;
pub mod solver;
pub mod study;

pub use error::{Error, Result};
pub use field::{Field, NormReport};
pub use grid::{Grid, GridMode};
pub use params::{AdmissibilityReport, ExponentTable, PhysParams, PowerCase};
pub use solver::{SolveConfig, TrajectoryRecord};
pub use study::{StudyConfig, StudyReport};
