//! Compressible Navier-Stokes simulation with relative-entropy diagnostics.
//!
//! The crate is organised bottom-up:
//!
//! - [`fields`]: structured grids, cell-centred fields, finite-difference
//!   operators, the viscous stress tensor, norms and Korn-ratio estimates.
//! - [`thermo`]: the isentropic pressure law, its pressure potential and the
//!   Bregman gap used by every energy functional.
//! - [`solver`]: an explicit SSP-RK2 finite-difference integrator, total
//!   energy accounting, manufactured forcing and binary checkpoints.
//! - [`relentropy`]: test pairs, relative entropy, the remainder functional,
//!   relative-energy residuals and Gronwall envelopes.
//! - [`harness`]: experiment configs, the experiment registry, CSV series and
//!   run manifests.

pub mod error;
pub mod fields;
pub mod harness;
pub mod numerics;
pub mod relentropy;
pub mod solver;
pub mod thermo;

pub use error::{Error, Result};
pub use fields::{
    BoundaryKind, Grid, ScalarField, Side, TensorField, VectorField, ViscosityParams,
};
pub use relentropy::{
    AdmissibilityReport, Compatibility, DiagnosticsRecord, PairPoint, RemainderBreakdown,
    TestPair,
};
pub use solver::{FluidParams, Forcing, State, Trajectory};
pub use thermo::{Isentropic, PressureLaw};
