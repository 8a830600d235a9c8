//! Body forces and manufactured sources.

use std::sync::Arc;

use crate::error::Result;
use crate::fields::Grid;
use crate::relentropy::{PairPoint, TestPair};

use super::{check_compatible, FluidParams};

/// Right-hand sides of the momentum and continuity equations.
///
/// The momentum equation receives `ρf + u g` and the continuity equation `g`,
/// where `f` is the body force and `g` the mass source.
pub trait Forcing: Send + Sync {
    /// Body force `f(t, x)` (acceleration).
    fn body_force(&self, t: f64, x: [f64; 2]) -> [f64; 2];

    fn mass_source(&self, _t: f64, _x: [f64; 2]) -> f64 {
        0.0
    }

    /// `(mass source, body force)` in one evaluation.
    fn sources(&self, t: f64, x: [f64; 2]) -> (f64, [f64; 2]) {
        (self.mass_source(t, x), self.body_force(t, x))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoForcing;

impl Forcing for NoForcing {
    fn body_force(&self, _t: f64, _x: [f64; 2]) -> [f64; 2] {
        [0.0; 2]
    }
}

/// `(g_mass, g_mom)` with `g_mass = ∂_t r + div(rU)` and
/// `g_mom = ∂_t(rU) + div(rU⊗U) + ∇p(r) − div S(∇U)`.
pub fn mms_sources(pair: &dyn TestPair, params: &FluidParams, t: f64, x: [f64; 2]) -> (f64, [f64; 2]) {
    let d = pair.dim();
    let p = pair.point(t, x);
    let (g_mass, accel) = balance(&p, params, d);
    let mut g_mom = [0.0; 2];
    for k in 0..d {
        g_mom[k] = p.u[k] * g_mass + p.r * accel[k];
    }
    (g_mass, g_mom)
}

/// `g_mass` and the body force `f = (g_mom − U g_mass)/r`, which by the
/// product rule is `∂_t U + U·∇U + (p′(r)∇r − div S(∇U))/r`.
fn balance(p: &PairPoint, params: &FluidParams, d: usize) -> (f64, [f64; 2]) {
    let mut g_mass = p.dt_r + p.r * p.div_u(d);
    for a in 0..d {
        g_mass += p.u[a] * p.grad_r[a];
    }
    let ds = p.div_stress(&params.viscosity, d);
    let dp = params.law.dp(p.r);
    let mut f = [0.0; 2];
    for k in 0..d {
        let mut acc = p.dt_u[k];
        for a in 0..d {
            acc += p.u[a] * p.grad_u[k][a];
        }
        f[k] = acc + (dp * p.grad_r[k] - ds[k]) / p.r;
    }
    (g_mass, f)
}

/// Sources that make a smooth pair an exact solution.
///
/// The momentum source is expressed as a body force `f = (g_mom − U g_mass)/r`
/// so that the solver's `ρf + u g_mass` reproduces `g_mom` on the pair itself.
#[derive(Clone, Debug)]
pub struct MmsForcing {
    pair: Arc<dyn TestPair>,
    params: FluidParams,
}

impl MmsForcing {
    pub fn pair(&self) -> &Arc<dyn TestPair> {
        &self.pair
    }
}

impl Forcing for MmsForcing {
    fn body_force(&self, t: f64, x: [f64; 2]) -> [f64; 2] {
        let p = self.pair.point(t, x);
        balance(&p, &self.params, self.pair.dim()).1
    }

    fn mass_source(&self, t: f64, x: [f64; 2]) -> f64 {
        let p = self.pair.point(t, x);
        balance(&p, &self.params, self.pair.dim()).0
    }

    fn sources(&self, t: f64, x: [f64; 2]) -> (f64, [f64; 2]) {
        balance(&self.pair.point(t, x), &self.params, self.pair.dim())
    }
}

/// Manufactured forcing for `pair` on `grid`; the pair must respect the
/// grid's walls.
pub fn mms_forcing(pair: Arc<dyn TestPair>, grid: &Grid, params: &FluidParams) -> Result<MmsForcing> {
    check_compatible(pair.as_ref(), grid)?;
    Ok(MmsForcing {
        pair,
        params: *params,
    })
}
