//! Weak-strong comparison: the relative entropy of a run against a strong
//! solution, and its Gronwall envelope.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::cumulative_trapezoid;
use crate::solver::{FluidParams, Trajectory};

use super::gronwall::{gronwall_envelope, gronwall_h};
use super::pair::TestPair;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub times: Vec<f64>,
    /// `E(τ)` of the run against the strong solution.
    pub rel_entropy: Vec<f64>,
    pub envelope: Vec<f64>,
    pub max_rel_entropy: f64,
    pub tol: f64,
    /// `E(τ) ≤ envelope(τ) + tol` at every saved time.
    pub holds: bool,
    /// Smallest `K` that would have made the envelope hold with `tol = 0`,
    /// for the weights of this run (zero when `E` never grows).
    pub required_k: f64,
}

/// Compares a run with the strong solution `pair_strong`.
///
/// The trajectory's records must have been evaluated against `pair_strong`;
/// `h` is recomputed on the run's grid with constant `k`.
pub fn weak_strong_gap(
    run: &Trajectory,
    pair_strong: &dyn TestPair,
    params: &FluidParams,
    k: f64,
    tol: f64,
) -> Result<GapReport> {
    if !(tol >= 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be >= 0")));
    }
    let times = run.times();
    let e: Vec<f64> = run.records().map(|r| r.rel_entropy).collect();
    let grid = *run.final_state().grid();
    let unit = gronwall_h(pair_strong, &grid, params, 1.0, &times)?;
    let h: Vec<f64> = unit.iter().map(|v| k * v).collect();
    let envelope = gronwall_envelope(e[0], &times, &h)?;
    let holds = e.iter().zip(&envelope).all(|(e, env)| *e <= env + tol);
    Ok(GapReport {
        max_rel_entropy: e.iter().copied().fold(0.0, f64::max),
        required_k: required_k(&times, &e, &unit),
        holds,
        tol,
        times,
        rel_entropy: e,
        envelope,
    })
}

/// `max_τ ln(E(τ)/E(0)) / ∫_0^τ ĥ` over times where `E` exceeds `E(0)`,
/// with `ĥ` the weight at `K = 1`.
pub fn required_k(times: &[f64], e: &[f64], unit_h: &[f64]) -> f64 {
    let ih = cumulative_trapezoid(times, unit_h);
    let e0 = e[0];
    if !(e0 > 0.0) {
        return if e.iter().any(|v| *v > 0.0) {
            f64::INFINITY
        } else {
            0.0
        };
    }
    (1..e.len())
        .filter(|&k| e[k] > e0 && ih[k] > 0.0)
        .map(|k| (e[k] / e0).ln() / ih[k])
        .fold(0.0, f64::max)
}

/// Ratios `max E(coarse) / max E(fine)` between consecutive resolutions.
pub fn refinement_factors(reports: &[GapReport]) -> Vec<f64> {
    reports
        .windows(2)
        .map(|w| w[0].max_rel_entropy / w[1].max_rel_entropy)
        .collect()
}
