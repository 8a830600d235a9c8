//! Discrete Korn-type ratios `‖z‖²_{W^{1,2}} / (‖S(∇z)‖²_{L²} + ‖R|z|²‖_{L¹})`.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{compensated_sum, stream_rng};

use super::field::{ScalarField, VectorField};
use super::grid::Grid;
use super::norms::l2_norm_sq;
use super::ops::gradient;
use super::stress::{stress, ViscosityParams};

/// Ratios above this are indistinguishable from a stress-free field.
const DEGENERATE_RATIO: f64 = 1e20;

/// Korn ratio of `z`, with the optional weighted zero-order term.
///
/// Without a weight this is the plain Korn quotient, which blows up on rigid
/// motions; a nonnegative weight with positive mass restores a finite value.
pub fn korn_ratio(
    z: &VectorField,
    visc: &ViscosityParams,
    weight: Option<&ScalarField>,
) -> Result<f64> {
    let g = *z.grid();
    let grad = gradient(z)?;
    let numerator = l2_norm_sq(z) + l2_norm_sq(&grad);
    let mut denominator = l2_norm_sq(&stress(&grad, visc));
    if let Some(w) = weight {
        g.check_same(w.grid())?;
        if let Some(k) = w.values().iter().position(|v| *v < 0.0) {
            return Err(Error::Domain(format!("Korn weight negative at cell {k}")));
        }
        let dv = g.cell_volume();
        let mass = compensated_sum(w.values().iter().map(|v| v * dv));
        if mass <= 0.0 {
            return Err(Error::Domain("Korn weight has zero mass".into()));
        }
        denominator += compensated_sum(w.values().iter().enumerate().map(|(k, r)| {
            let v = z.at(k);
            r * (v[0] * v[0] + v[1] * v[1]) * dv
        }));
    }
    if numerator == 0.0 {
        return Err(Error::DegenerateField("z vanishes identically".into()));
    }
    if denominator <= numerator / DEGENERATE_RATIO {
        return Err(Error::DegenerateField(format!(
            "S(∇z) vanishes to machine tolerance (denominator {denominator:e})"
        )));
    }
    Ok(numerator / denominator)
}

/// Number of sine modes per axis in the random ensemble.
pub const ENSEMBLE_MODES: usize = 6;

/// Member `index` of a seeded ensemble of smooth fields vanishing on the
/// box boundary: sine series with standard-normal coefficients damped by
/// `1/(m + n)`.
pub fn random_zero_boundary_field(grid: &Grid, seed: u64, index: u64) -> VectorField {
    let mut rng = stream_rng(seed, index);
    let d = grid.dim();
    let m_y = if d == 2 { ENSEMBLE_MODES } else { 1 };
    let mut coeffs = vec![[[0.0f64; 2]; ENSEMBLE_MODES]; m_y];
    for (n, row) in coeffs.iter_mut().enumerate() {
        for (m, c) in row.iter_mut().enumerate() {
            for comp in c.iter_mut().take(d) {
                let a: f64 = StandardNormal.sample(&mut rng);
                *comp = a / (m + n + 1 + usize::from(d == 2)) as f64;
            }
        }
    }
    let lx = grid.extent(0);
    let ly = if d == 2 { grid.extent(1) } else { 1.0 };
    let (x0, y0) = (grid.origin(0), if d == 2 { grid.origin(1) } else { 0.0 });
    let mut comps = vec![vec![0.0; grid.len()]; d];
    for idx in 0..grid.len() {
        let x = grid.center_of(idx);
        let sx: Vec<f64> =
            (1..=ENSEMBLE_MODES).map(|m| (m as f64 * PI * (x[0] - x0) / lx).sin()).collect();
        let sy: Vec<f64> = if d == 2 {
            (1..=ENSEMBLE_MODES).map(|n| (n as f64 * PI * (x[1] - y0) / ly).sin()).collect()
        } else {
            vec![1.0]
        };
        for (n, row) in coeffs.iter().enumerate() {
            for (m, c) in row.iter().enumerate() {
                let basis = sx[m] * sy[n];
                for k in 0..d {
                    comps[k][idx] += c[k] * basis;
                }
            }
        }
    }
    VectorField::from_raw(*grid, comps)
}

/// Korn ratios over a random ensemble, in index order.
#[derive(Clone, Debug)]
pub struct KornEnsemble {
    pub ratios: Vec<f64>,
}

impl KornEnsemble {
    /// Supremum over the first `k + 1` members, for every `k`.
    pub fn running_sup(&self) -> Vec<f64> {
        self.ratios
            .iter()
            .scan(0.0f64, |m, r| {
                *m = m.max(*r);
                Some(*m)
            })
            .collect()
    }

    /// Empirical Korn constant: the supremum over the whole ensemble.
    pub fn constant(&self) -> f64 {
        self.ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.ratios.iter().all(|r| r.is_finite() && *r > 0.0)
    }
}

pub fn korn_ensemble(
    grid: &Grid,
    visc: &ViscosityParams,
    seed: u64,
    count: usize,
) -> Result<KornEnsemble> {
    let ratios = (0..count as u64)
        .into_par_iter()
        .map(|k| korn_ratio(&random_zero_boundary_field(grid, seed, k), visc, None))
        .collect::<Result<Vec<_>>>()?;
    Ok(KornEnsemble { ratios })
}
