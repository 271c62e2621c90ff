//! Bounds-preserving Runge–Kutta (BP-RK) time integration for hyperbolic
//! conservation laws on periodic grids.
//!
//! The solution is advanced in an auxiliary space obtained through a
//! bijective map from a per-node admissible set onto `R^m`, mapped back, and
//! then corrected so that every linear invariant (total mass, momentum,
//! energy) is preserved exactly. Spatial derivatives use a Fourier
//! pseudospectral collocation scheme without dealiasing.
//!
//! Layout:
//! - [`tableau`] / [`stepper`]: explicit Runge–Kutta stepping, plain and bounds preserving
//! - [`mappings`]: admissible sets and their bijective maps
//! - [`bounds`]: discrete maximum principle and invariant domain bounds
//! - [`mass_correction`]: mass defect, set distances and the conservative correction
//! - [`spectral`] / [`grid`]: Fourier collocation on periodic equispaced grids
//! - [`physics`]: scalar fluxes, compressible Euler and the exact Riemann solver
//! - [`problems`]: initial conditions and reference solutions
//! - [`driver`]: configuration, run orchestration and CSV output

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod driver;
pub mod error;
pub mod grid;
pub mod mappings;
pub mod mass_correction;
pub mod physics;
pub mod problems;
pub mod spectral;
pub mod stepper;
pub mod tableau;

mod sum;

pub use error::{Error, Result};
pub use grid::{Grid, GridState};
pub use mappings::{AdmissibleSet, BoundsMapping, EulerBounds};
pub use stepper::{bprk_step, rk_step, BpOptions, GammaMode, Rhs, StepDiagnostics};
pub use tableau::ButcherTableau;
