//! Numerical laboratory for radially symmetric positive solutions of the
//! conformal scalar curvature equation
//!
//! ```text
//! Δu + K(|x|) u^((n+2)/(n-2)) = 0   in ℝⁿ, n ≥ 3.
//! ```
//!
//! The crate integrates the radial equation and its Emden–Fowler (cylinder)
//! form, evaluates the Pohozaev functional in surface and volume form,
//! classifies decay, completeness and volume growth of the conformal metric,
//! and runs named verification scenarios against closed-form oracles.

// `!(x > 0.0)` is the NaN-rejecting form of the comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod calibration;
pub mod curvature;
pub mod dimension;
pub mod error;
pub mod exact;
pub mod harness;
pub mod io;
pub mod pohozaev;
pub mod quadrature;
pub mod solver;

pub use asymptotics::{AsymptoticsReport, Completeness, DecayClass, VolumeGrowth};
pub use calibration::Calibration;
pub use curvature::{Bounds, CurvatureProfile, ProfileSpec};
pub use dimension::Dimension;
pub use error::{Error, Result};
pub use exact::ExactSolution;
pub use harness::{run_scenario, solve_scenario, sweep, Check, Initial, Outcome, Scenario, VerificationReport};
pub use pohozaev::PohozaevReport;
pub use solver::{
    cylinder_transform, integrate_cylinder, integrate_radial, inverse_transform, shoot,
    CylinderSample, CylinderSolution, RadialSample, RadialSolution, Status, Tolerances,
};
