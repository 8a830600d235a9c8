//! Grids, cell-centred fields and the discrete calculus used everywhere else.

mod field;
mod grid;
pub mod korn;
mod norms;
mod ops;
mod stress;

pub use field::{ScalarField, TensorField, VectorField};
pub use grid::{BoundaryKind, Grid, Side, MIN_CELLS};
pub use korn::{korn_ensemble, korn_ratio, random_zero_boundary_field, KornEnsemble};
pub use norms::{l2_norm_sq, lp_norm, Pointwise};
pub use ops::{diff_axis, divergence, gradient, scalar_gradient};
pub use stress::{dissipation_pairing, stress, ViscosityParams};
