//! Time-integrated balances: the energy budget and the relative-energy
//! residual. Both go through [`budget_residual`] so that with the pair
//! `(ρ̄, 0)` they agree bit for bit.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::cumulative_trapezoid;
use crate::solver::{FluidParams, Forcing, Trajectory};

use super::functional::Diagnostics;
use super::gronwall::gronwall_envelope;
use super::pair::TestPair;
use super::DiagnosticsRecord;

/// `e(τ) + ∫_0^τ dissipation − e(0) − ∫_0^τ source`, trapezoid in time.
pub fn budget_residual(times: &[f64], e: &[f64], dissipation: &[f64], source: &[f64]) -> Result<Vec<f64>> {
    let n = times.len();
    if n == 0 || e.len() != n || dissipation.len() != n || source.len() != n {
        return Err(Error::Structural("budget series must be nonempty and of equal length".into()));
    }
    let dis = cumulative_trapezoid(times, dissipation);
    let src = cumulative_trapezoid(times, source);
    Ok((0..n).map(|k| e[k] + dis[k] - e[0] - src[k]).collect())
}

fn columns(records: &[DiagnosticsRecord], f: impl Fn(&DiagnosticsRecord) -> f64) -> Vec<f64> {
    records.iter().map(f).collect()
}

/// Fills `rei_residual`, `energy_residual` and `gronwall_env` from the
/// instantaneous columns.
pub fn fill_running_columns(records: &mut [DiagnosticsRecord]) -> Result<()> {
    let times = columns(records, |r| r.time);
    let rei = budget_residual(
        &times,
        &columns(records, |r| r.rel_entropy),
        &columns(records, |r| r.dissipation),
        &columns(records, |r| r.remainder.total),
    )?;
    let energy = energy_residual_of(records)?;
    let env = gronwall_envelope(
        records[0].rel_entropy,
        &times,
        &columns(records, |r| r.gronwall_h),
    )?;
    for (k, r) in records.iter_mut().enumerate() {
        r.rei_residual = rei[k];
        r.energy_residual = energy[k];
        r.gronwall_env = env[k];
    }
    Ok(())
}

fn energy_residual_of(records: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    budget_residual(
        &columns(records, |r| r.time),
        &columns(records, |r| r.energy),
        &columns(records, |r| r.energy_dissipation),
        &columns(records, |r| r.power),
    )
}

/// Energy budget `E(τ) + ∫∫S(∇u):∇u + β∫∮|u|² − E(0) − ∫∫ρf·u` of a run.
pub fn energy_budget_residual(traj: &Trajectory, _params: &FluidParams) -> Result<Vec<f64>> {
    let records: Vec<DiagnosticsRecord> = traj.records().cloned().collect();
    energy_residual_of(&records)
}

/// Relative-energy residual of a run against `pair`, recomputed from the
/// trajectory's retained states.
pub fn rei_residual(
    traj: &Trajectory,
    pair: Arc<dyn TestPair>,
    params: &FluidParams,
    forcing: Arc<dyn Forcing>,
) -> Result<Vec<f64>> {
    let diag = Diagnostics::new(pair, *params, forcing, 0.0)?;
    let states = traj.states()?;
    let records = traj
        .records()
        .zip(states)
        .map(|(rec, s)| diag.record(s, rec.clipped_mass))
        .collect::<Result<Vec<_>>>()?;
    budget_residual(
        &columns(&records, |r| r.time),
        &columns(&records, |r| r.rel_entropy),
        &columns(&records, |r| r.dissipation),
        &columns(&records, |r| r.remainder.total),
    )
}
