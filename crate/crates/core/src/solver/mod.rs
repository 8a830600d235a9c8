//! Explicit finite-difference integrator for the compressible Navier-Stokes
//! system on structured grids.
//!
//! Density and momentum are advanced with SSP-RK2. Convection is conservative
//! first-order upwind (optionally central with a tunable upwind fraction), the
//! pressure gradient is central, and the viscous term is built from
//! half-cell central differences with boundary conditions imposed through
//! one layer of ghost cells.

mod checkpoint;
mod forcing;
mod run;
mod scheme;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{BoundaryKind, Grid, ScalarField, VectorField, ViscosityParams};
use crate::numerics::{compensated_sum, stream_rng};
use crate::relentropy::TestPair;
use crate::thermo::Isentropic;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_MAGIC};
pub use forcing::{mms_forcing, mms_sources, Forcing, MmsForcing, NoForcing};
pub use run::{run, Frame, RunSettings, Trajectory};
pub use scheme::{stable_dt, step, Convection, SchemeOptions, Step};

pub use crate::relentropy::{energy_budget_residual, total_energy};

/// Material parameters of the fluid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidParams {
    pub viscosity: ViscosityParams,
    pub law: Isentropic,
}

impl FluidParams {
    pub fn new(viscosity: ViscosityParams, law: Isentropic) -> Result<Self> {
        viscosity.validate()?;
        law.validate()?;
        Ok(Self { viscosity, law })
    }

    pub fn rho_bar(&self) -> f64 {
        self.law.rho_bar
    }
}

/// Density and velocity at one time instant.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub time: f64,
    pub rho: ScalarField,
    pub u: VectorField,
}

impl State {
    pub fn new(time: f64, rho: ScalarField, u: VectorField) -> Result<Self> {
        rho.grid().check_same(u.grid())?;
        if let Some(idx) = rho.values().iter().position(|&r| r < 0.0) {
            return Err(Error::Domain(format!(
                "negative density {} at cell {idx}",
                rho.values()[idx]
            )));
        }
        if !time.is_finite() {
            return Err(Error::Domain(format!("state time {time} is not finite")));
        }
        Ok(Self { time, rho, u })
    }

    /// Uniform density at rest.
    pub fn rest(grid: Grid, rho: f64) -> Result<Self> {
        Self::new(0.0, ScalarField::constant(grid, rho), VectorField::zeros(grid))
    }

    /// The pair `(r, U)` sampled at cell centres at time `t`.
    pub fn sample(pair: &dyn TestPair, grid: Grid, t: f64) -> Result<Self> {
        if pair.dim() != grid.dim() {
            return Err(Error::Structural(format!(
                "{}D pair `{}` on a {}D grid",
                pair.dim(),
                pair.name(),
                grid.dim()
            )));
        }
        let pts: Vec<_> = (0..grid.len())
            .map(|idx| pair.jets(t, grid.center_of(idx)))
            .collect();
        let rho = ScalarField::new(grid, pts.iter().map(|j| j.r.v).collect())?;
        let comps = (0..grid.dim())
            .map(|k| pts.iter().map(|j| j.u[k].v).collect())
            .collect();
        Self::new(t, rho, VectorField::new(grid, comps)?)
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// `∫ρ dx`.
    pub fn mass(&self) -> f64 {
        let dv = self.grid().cell_volume();
        compensated_sum(self.rho.values().iter().map(|r| r * dv))
    }

    /// Smooth random perturbation `ρ(1 + εφ)`, `u + εψ`, with `φ`, `ψ`
    /// normalised to unit maximum and `ψ` vanishing on every wall.
    ///
    /// The fields depend only on `(seed, index)`.
    pub fn perturbed(&self, amplitude: f64, seed: u64, index: u64) -> Result<Self> {
        if !(amplitude.abs() < 1.0) {
            return Err(Error::Domain(format!(
                "perturbation amplitude {amplitude} would allow vacuum"
            )));
        }
        let grid = *self.grid();
        let (phi, psi) = perturbation_fields(&grid, seed, index);
        let rho = self
            .rho
            .values()
            .iter()
            .zip(&phi)
            .map(|(r, p)| r * (1.0 + amplitude * p))
            .collect();
        let comps = (0..grid.dim())
            .map(|k| {
                self.u
                    .component(k)
                    .iter()
                    .zip(&psi[k])
                    .map(|(u, p)| u + amplitude * p)
                    .collect()
            })
            .collect();
        Self::new(
            self.time,
            ScalarField::new(grid, rho)?,
            VectorField::new(grid, comps)?,
        )
    }
}

const PERTURBATION_MODES: usize = 3;

/// One axis of the perturbation basis: `(density mode, velocity mode)`.
fn axis_modes(grid: &Grid, axis: usize, m: usize, phase: f64, xi: f64) -> (f64, f64) {
    use std::f64::consts::PI;
    let m = m as f64;
    if grid.is_periodic(axis) {
        let v = (2.0 * PI * m * xi + phase).cos();
        (v, v)
    } else {
        ((m * PI * xi).cos(), (m * PI * xi).sin())
    }
}

fn perturbation_fields(grid: &Grid, seed: u64, index: u64) -> (Vec<f64>, [Vec<f64>; 2]) {
    use rand::Rng;
    use rand_distr::StandardNormal;

    let d = grid.dim();
    let mut rng = stream_rng(seed, index);
    let nm = PERTURBATION_MODES;
    let ny_modes = if d == 2 { nm } else { 1 };
    // Coefficients: density, then one set per velocity component; plus phases.
    let mut draw = |count: usize| -> Vec<f64> {
        (0..count).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
    };
    let coeff: Vec<Vec<f64>> = (0..=d).map(|_| draw(nm * ny_modes)).collect();
    let phases: Vec<f64> = draw(2 * nm);

    let mut phi = vec![0.0; grid.len()];
    let mut psi = [vec![0.0; grid.len()], vec![0.0; grid.len()]];
    for idx in 0..grid.len() {
        let x = grid.center_of(idx);
        let xi = [
            (x[0] - grid.origin(0)) / grid.extent(0),
            if d == 2 {
                (x[1] - grid.origin(1)) / grid.extent(1)
            } else {
                0.0
            },
        ];
        for m in 1..=nm {
            let (dx, vx) = axis_modes(grid, 0, m, phases[m - 1], xi[0]);
            for n in 1..=ny_modes {
                let (dy, vy) = if d == 2 {
                    axis_modes(grid, 1, n, phases[nm + n - 1], xi[1])
                } else {
                    (1.0, 1.0)
                };
                let c = (m - 1) * ny_modes + (n - 1);
                let w = 1.0 / (m + n) as f64;
                phi[idx] += coeff[0][c] * w * dx * dy;
                for k in 0..d {
                    psi[k][idx] += coeff[k + 1][c] * w * vx * vy;
                }
            }
        }
    }
    let normalise = |v: &mut Vec<f64>| {
        let m = v.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        if m > 0.0 {
            v.iter_mut().for_each(|x| *x /= m);
        }
    };
    normalise(&mut phi);
    for comp in psi.iter_mut().take(d) {
        normalise(comp);
    }
    (phi, psi)
}

/// Whether a grid's walls accept the pair's boundary behaviour.
pub(crate) fn check_compatible(pair: &dyn TestPair, grid: &Grid) -> Result<()> {
    use crate::relentropy::Compatibility::*;
    if pair.dim() != grid.dim() {
        return Err(Error::Structural(format!(
            "{}D pair `{}` on a {}D grid",
            pair.dim(),
            pair.name(),
            grid.dim()
        )));
    }
    let c = pair.compatibility();
    let ok = |kind| match kind {
        BoundaryKind::Periodic => true,
        BoundaryKind::NoSlip => c == NoSlipCompatible,
        BoundaryKind::NavierSlip => matches!(c, NoSlipCompatible | SlipCompatible),
    };
    for axis in 0..grid.dim() {
        for side in crate::fields::Side::BOTH {
            let kind = grid.boundary(axis, side);
            if !ok(kind) {
                return Err(Error::Admissibility(format!(
                    "pair `{}` ({c:?}) does not satisfy {kind:?} walls on axis {axis}",
                    pair.name()
                )));
            }
        }
    }
    Ok(())
}
