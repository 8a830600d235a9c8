//! Relative-entropy diagnostics.
//!
//! A run `(ρ, u)` is compared with a smooth pair `(r, U)` through
//!
//! - the relative entropy `E = ∫ ½ρ|u − U|² + H(ρ) − H′(r)(ρ − r) − H(r)`,
//! - the relative dissipation `∫ S(∇u − ∇U) : (∇u − ∇U)` (plus
//!   `β∮|u − U|²` on Navier-slip walls),
//! - the remainder `R`, split into its convective, viscous, force, entropy,
//!   pressure and wall-friction parts,
//!
//! and the relative energy balance `E(τ) + ∫D − E(0) − ∫R` is reported as a
//! residual. The Gronwall weight `h` and the envelope `E(0)·exp(∫h)` bound
//! how far a run can drift from a strong solution.

mod admissibility;
mod functional;
mod gap;
mod gronwall;
pub(crate) mod jet;
mod pair;
mod residual;

use serde::Serialize;

pub use admissibility::{validate_test_pair, AdmissibilityCheck, AdmissibilityReport, R_FLOOR, TRACE_TOL};
pub use functional::{relative_dissipation, relative_entropy, remainder, total_energy, Diagnostics};
pub use gap::{refinement_factors, required_k, weak_strong_gap, GapReport};
pub use gronwall::{gronwall_envelope, gronwall_h};
pub use jet::Jet;
pub use pair::{
    BoxVortex, Compatibility, ConstantPair, DensityWave, NavierCell, PairJets, PairPoint, PairSpec,
    PeriodicVortex, ShearLayer, SlipCell, TestPair, WallBump,
};
pub use residual::{budget_residual, energy_budget_residual, fill_running_columns, rei_residual};

/// The remainder `R` term by term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct RemainderBreakdown {
    /// `∫ ρ(∂_t U + u·∇U)·(U − u)`
    pub convective: f64,
    /// `∫ S(∇U) : ∇(U − u)`
    pub viscous: f64,
    /// `∫ ρf·(u − U)`
    pub force: f64,
    /// `∫ (r − ρ)∂_t H′(r) + ∇H′(r)·(rU − ρu)`
    pub entropy: f64,
    /// `−∫ div U (p(ρ) − p(r))`
    pub pressure: f64,
    /// `−β ∮ U·(u − U)`, zero without Navier-slip walls.
    pub friction: f64,
    pub total: f64,
}

impl RemainderBreakdown {
    pub fn from_terms(
        convective: f64,
        viscous: f64,
        force: f64,
        entropy: f64,
        pressure: f64,
        friction: f64,
    ) -> Self {
        Self {
            convective,
            viscous,
            force,
            entropy,
            pressure,
            friction,
            total: convective + viscous + force + entropy + pressure + friction,
        }
    }
}

/// Diagnostics of one saved frame.
///
/// `rei_residual`, `energy_residual` and `gronwall_env` are running columns,
/// filled once the whole trajectory is known.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub mass: f64,
    /// Total energy relative to `ρ̄`.
    pub energy: f64,
    /// `∫ S(∇u):∇u + β∮|u|²`.
    pub energy_dissipation: f64,
    /// `∫ ρf·u`.
    pub power: f64,
    /// Relative dissipation, wall friction included.
    pub dissipation: f64,
    pub rel_entropy: f64,
    pub remainder: RemainderBreakdown,
    pub rei_residual: f64,
    pub energy_residual: f64,
    pub gronwall_h: f64,
    pub gronwall_env: f64,
    /// Mass removed by the density floor since the start of the run.
    pub clipped_mass: f64,
}
