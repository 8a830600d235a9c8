//! Semi-discretisation and the SSP-RK2 step.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{diff_axis, BoundaryKind, Grid, ScalarField, Side, VectorField, ViscosityParams};

use super::{FluidParams, Forcing, State};

/// Below this the integrator gives up rather than crawl.
pub const COLLAPSE_DT: f64 = 1e-12;

/// Convective flux on cell faces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Convection {
    /// First-order upwind.
    #[default]
    Upwind,
    /// Central flux plus `upwind_fraction` of the upwind dissipation;
    /// `1` recovers upwind, `0` is purely central.
    Central { upwind_fraction: f64 },
}

impl Convection {
    fn kappa(self) -> f64 {
        match self {
            Convection::Upwind => 1.0,
            Convection::Central { upwind_fraction } => upwind_fraction,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeOptions {
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub convection: Convection,
}

fn default_cfl() -> f64 {
    0.4
}

impl Default for SchemeOptions {
    fn default() -> Self {
        Self {
            cfl: default_cfl(),
            convection: Convection::Upwind,
        }
    }
}

impl SchemeOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl = {} must lie in (0, 1]", self.cfl)));
        }
        let k = self.convection.kappa();
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::Config(format!("upwind_fraction = {k} must lie in [0, 1]")));
        }
        Ok(())
    }
}

/// Largest stable step for `s`.
///
/// `cfl · min over cells of min(Δx/(|u| + c_s), ρΔx²/(d(4μ/3 + η)))` with
/// `c_s = √p′(ρ)` and `d` the grid dimension. Vacuum cells at rest impose no
/// limit.
pub fn stable_dt(s: &State, params: &FluidParams, opts: &SchemeOptions) -> Result<f64> {
    let g = s.grid();
    let h = g.min_spacing();
    let visc = params.viscosity;
    let diff = g.dim() as f64 * (4.0 / 3.0 * visc.mu + visc.eta);
    let mut best = f64::INFINITY;
    let mut cell = 0;
    for idx in 0..g.len() {
        let rho = s.rho.values()[idx];
        let u = s.u.at(idx);
        let speed = (u[0] * u[0] + u[1] * u[1]).sqrt();
        if rho == 0.0 && speed == 0.0 {
            continue;
        }
        let acoustic = h / (speed + params.law.dp(rho).sqrt());
        let viscous = rho * h * h / diff;
        let local = acoustic.min(viscous);
        if !(local >= best) {
            best = local;
            cell = idx;
        }
    }
    let dt = opts.cfl * best;
    if !(dt >= COLLAPSE_DT) || dt.is_infinite() {
        return Err(Error::TimeStepCollapse {
            cell,
            dt,
            time: s.time,
        });
    }
    Ok(dt)
}

/// Result of one step, with the mass removed by the density floor.
#[derive(Clone, Debug)]
pub struct Step {
    pub state: State,
    pub clipped_mass: f64,
}

/// Conserved variables `(ρ, ρu)`.
#[derive(Clone)]
struct Cons {
    rho: Vec<f64>,
    q: [Vec<f64>; 2],
}

impl Cons {
    fn from_state(s: &State) -> Self {
        let d = s.grid().dim();
        let rho = s.rho.values().to_vec();
        let mut q = [Vec::new(), Vec::new()];
        for (k, qk) in q.iter_mut().enumerate().take(d) {
            *qk = rho.iter().zip(s.u.component(k)).map(|(r, u)| r * u).collect();
        }
        Self { rho, q }
    }

    fn velocity(&self, d: usize) -> [Vec<f64>; 2] {
        let mut u = [Vec::new(), Vec::new()];
        for (k, uk) in u.iter_mut().enumerate().take(d) {
            *uk = self
                .rho
                .iter()
                .zip(&self.q[k])
                .map(|(&r, &m)| if r > 0.0 { m / r } else { 0.0 })
                .collect();
        }
        u
    }

    /// `self + dt·rate`, or `½(base + self + dt·rate)` when `base` is given.
    fn advance(&self, rate: &Cons, dt: f64, base: Option<&Cons>, d: usize) -> Cons {
        let comb = |x: &[f64], r: &[f64], b: Option<&[f64]>| -> Vec<f64> {
            match b {
                None => x.iter().zip(r).map(|(x, r)| x + dt * r).collect(),
                Some(b) => x
                    .iter()
                    .zip(r)
                    .zip(b)
                    .map(|((x, r), b)| 0.5 * b + 0.5 * (x + dt * r))
                    .collect(),
            }
        };
        let mut q = [Vec::new(), Vec::new()];
        for (k, qk) in q.iter_mut().enumerate().take(d) {
            *qk = comb(&self.q[k], &rate.q[k], base.map(|b| b.q[k].as_slice()));
        }
        Cons {
            rho: comb(&self.rho, &rate.rho, base.map(|b| b.rho.as_slice())),
            q,
        }
    }

    /// Floors negative densities at zero and returns the mass removed.
    fn clip(&mut self, cell_volume: f64, d: usize) -> f64 {
        let mut removed = 0.0;
        for idx in 0..self.rho.len() {
            if self.rho[idx] < 0.0 {
                removed -= self.rho[idx] * cell_volume;
                self.rho[idx] = 0.0;
                for k in 0..d {
                    self.q[k][idx] = 0.0;
                }
            }
        }
        removed
    }

    fn check_finite(&self, d: usize, time: f64) -> Result<()> {
        let bad = self
            .rho
            .iter()
            .chain(self.q.iter().take(d).flatten())
            .position(|v| !v.is_finite());
        match bad {
            None => Ok(()),
            Some(pos) => Err(Error::Divergence {
                time,
                reason: format!("non-finite value at cell {}", pos % self.rho.len()),
            }),
        }
    }
}

/// Velocity with one ghost layer carrying the boundary conditions.
struct Padded {
    nx: isize,
    ny: isize,
    gy: isize,
    comps: [Vec<f64>; 2],
}

impl Padded {
    fn new(g: &Grid, u: &[Vec<f64>; 2], visc: &ViscosityParams) -> Self {
        let d = g.dim();
        let (nx, ny) = (g.nx() as isize, g.ny() as isize);
        let gy = if d == 2 { 1 } else { 0 };
        let width = (nx + 2) as usize;
        let rows = (ny + 2 * gy) as usize;
        let mut p = Padded {
            nx,
            ny,
            gy,
            comps: [vec![0.0; width * rows], vec![0.0; width * rows]],
        };
        for k in 0..d {
            for j in 0..ny {
                for i in 0..nx {
                    let at = p.at(i, j);
                    p.comps[k][at] = u[k][g.index(i as usize, j as usize)];
                }
            }
        }
        if d == 2 {
            for k in 0..d {
                for i in 0..nx {
                    let lo = ghost(g, visc, 1, Side::Lower, k, p.get(k, i, 0), p.get(k, i, ny - 1));
                    let hi = ghost(g, visc, 1, Side::Upper, k, p.get(k, i, ny - 1), p.get(k, i, 0));
                    let (a, b) = (p.at(i, -1), p.at(i, ny));
                    p.comps[k][a] = lo;
                    p.comps[k][b] = hi;
                }
            }
        }
        for k in 0..d {
            for j in -gy..ny + gy {
                let lo = ghost(g, visc, 0, Side::Lower, k, p.get(k, 0, j), p.get(k, nx - 1, j));
                let hi = ghost(g, visc, 0, Side::Upper, k, p.get(k, nx - 1, j), p.get(k, 0, j));
                let (a, b) = (p.at(-1, j), p.at(nx, j));
                p.comps[k][a] = lo;
                p.comps[k][b] = hi;
            }
        }
        p
    }

    #[inline]
    fn at(&self, i: isize, j: isize) -> usize {
        debug_assert!(i >= -1 && i <= self.nx && j >= -self.gy && j < self.ny + self.gy);
        ((j + self.gy) * (self.nx + 2) + i + 1) as usize
    }

    #[inline]
    fn get(&self, k: usize, i: isize, j: isize) -> f64 {
        self.comps[k][self.at(i, j)]
    }
}

/// Ghost value of component `k` behind the wall `(axis, side)`.
///
/// `inner` is the adjacent interior value and `wrapped` the value across a
/// periodic seam. Navier-slip walls use the friction relation
/// `μ ∂_n u_t + β u_t = 0` with the wall value taken as the mean of the two
/// neighbouring cells.
fn ghost(
    g: &Grid,
    visc: &ViscosityParams,
    axis: usize,
    side: Side,
    k: usize,
    inner: f64,
    wrapped: f64,
) -> f64 {
    match g.boundary(axis, side) {
        BoundaryKind::Periodic => wrapped,
        BoundaryKind::NoSlip => -inner,
        BoundaryKind::NavierSlip if k == axis => -inner,
        BoundaryKind::NavierSlip => {
            let bh = visc.beta * g.spacing(axis);
            inner * (2.0 * visc.mu - bh) / (2.0 * visc.mu + bh)
        }
    }
}

/// Index of the neighbour of `(i, j)` along `axis`, `None` across a wall.
#[inline]
fn neighbour(g: &Grid, i: usize, j: usize, axis: usize, up: bool) -> Option<usize> {
    let n = g.cells(axis);
    let c = if axis == 0 { i } else { j };
    let next = if up {
        if c + 1 < n {
            c + 1
        } else if g.is_periodic(axis) {
            0
        } else {
            return None;
        }
    } else if c > 0 {
        c - 1
    } else if g.is_periodic(axis) {
        n - 1
    } else {
        return None;
    };
    Some(if axis == 0 { g.index(next, j) } else { g.index(i, next) })
}

struct Ctx<'a> {
    grid: &'a Grid,
    params: &'a FluidParams,
    kappa: f64,
    forcing: &'a dyn Forcing,
}

impl Ctx<'_> {
    fn rate(&self, t: f64, c: &Cons) -> Cons {
        let g = self.grid;
        let d = g.dim();
        let visc = &self.params.viscosity;
        let u = c.velocity(d);
        let p: Vec<f64> = c.rho.iter().map(|&r| self.params.law.p(r)).collect();
        let dp: Vec<Vec<f64>> = (0..d).map(|a| diff_axis(g, &p, a)).collect();
        let pad = Padded::new(g, &u, visc);
        let kappa = self.kappa;

        // Face flux of (ρ, ρu) between cells l and r along `a`.
        let conv = |l: usize, r: usize, a: usize| -> [f64; 3] {
            let un = 0.5 * (u[a][l] + u[a][r]);
            let diss = 0.5 * kappa * un.abs();
            let f = |x: &[f64]| un * 0.5 * (x[l] + x[r]) - diss * (x[r] - x[l]);
            let mut out = [f(&c.rho), 0.0, 0.0];
            for k in 0..d {
                out[k + 1] = f(&c.q[k]);
            }
            out
        };

        // Column `a` of S on the face between (i, j) and (i, j) + e_a.
        let face_stress = |i: isize, j: isize, a: usize| -> [f64; 2] {
            let (di, dj) = if a == 0 { (1, 0) } else { (0, 1) };
            let mut gm = [[0.0; 2]; 2];
            for (k, row) in gm.iter_mut().enumerate().take(d) {
                row[a] = (pad.get(k, i + di, j + dj) - pad.get(k, i, j)) / g.spacing(a);
                if d == 2 {
                    let b = 1 - a;
                    let (ei, ej) = if b == 0 { (1, 0) } else { (0, 1) };
                    row[b] = ((pad.get(k, i + ei, j + ej) - pad.get(k, i - ei, j - ej))
                        + (pad.get(k, i + di + ei, j + dj + ej) - pad.get(k, i + di - ei, j + dj - ej)))
                        / (4.0 * g.spacing(b));
                }
            }
            let s = visc.stress_at(&gm, d);
            [s[0][a], s[1][a]]
        };

        let rates: Vec<[f64; 3]> = (0..g.len())
            .into_par_iter()
            .map(|idx| {
                let (i, j) = g.coords(idx);
                let mut out = [0.0; 3];
                for a in 0..d {
                    let h = g.spacing(a);
                    let fu = neighbour(g, i, j, a, true).map_or([0.0; 3], |nb| conv(idx, nb, a));
                    let fd = neighbour(g, i, j, a, false).map_or([0.0; 3], |nb| conv(nb, idx, a));
                    for v in 0..=d {
                        out[v] -= (fu[v] - fd[v]) / h;
                    }
                    let (ii, jj) = (i as isize, j as isize);
                    let su = face_stress(ii, jj, a);
                    let sd = if a == 0 {
                        face_stress(ii - 1, jj, a)
                    } else {
                        face_stress(ii, jj - 1, a)
                    };
                    for k in 0..d {
                        out[k + 1] += (su[k] - sd[k]) / h;
                    }
                    out[a + 1] -= dp[a][idx];
                }
                let x = g.center_of(idx);
                let (gm, f) = self.forcing.sources(t, x);
                out[0] += gm;
                for k in 0..d {
                    out[k + 1] += c.rho[idx] * f[k] + u[k][idx] * gm;
                }
                out
            })
            .collect();

        let mut q = [Vec::new(), Vec::new()];
        for (k, qk) in q.iter_mut().enumerate().take(d) {
            *qk = rates.iter().map(|r| r[k + 1]).collect();
        }
        Cons {
            rho: rates.iter().map(|r| r[0]).collect(),
            q,
        }
    }
}

/// One SSP-RK2 (Heun) step of size `dt`.
pub fn step(
    s: &State,
    dt: f64,
    params: &FluidParams,
    forcing: &dyn Forcing,
    opts: &SchemeOptions,
) -> Result<Step> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("time step {dt} must be positive")));
    }
    let g = *s.grid();
    let d = g.dim();
    let ctx = Ctx {
        grid: &g,
        params,
        kappa: opts.convection.kappa(),
        forcing,
    };
    let t0 = s.time;
    let c0 = Cons::from_state(s);

    let k0 = ctx.rate(t0, &c0);
    let mut c1 = c0.advance(&k0, dt, None, d);
    c1.check_finite(d, t0 + dt)?;
    let mut clipped = c1.clip(g.cell_volume(), d);

    let k1 = ctx.rate(t0 + dt, &c1);
    let mut c2 = c1.advance(&k1, dt, Some(&c0), d);
    c2.check_finite(d, t0 + dt)?;
    clipped += c2.clip(g.cell_volume(), d);

    let u = c2.velocity(d);
    let state = State {
        time: t0 + dt,
        rho: ScalarField::from_raw(g, c2.rho),
        u: VectorField::from_raw(g, u.into_iter().take(d).collect()),
    };
    Ok(Step {
        state,
        clipped_mass: clipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BoundaryKind, Grid, ViscosityParams};
    use crate::solver::NoForcing;
    use crate::thermo::Isentropic;

    fn params(mu: f64, beta: f64) -> FluidParams {
        FluidParams::new(
            ViscosityParams::new(mu, 0.0, beta).unwrap(),
            Isentropic::new(1.0, 2.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn acoustic_limit_at_rest() {
        let g = Grid::square(16, 1.0, BoundaryKind::Periodic).unwrap();
        let s = State::rest(g, 1.0).unwrap();
        let dt = stable_dt(&s, &params(1e-12, 0.0), &SchemeOptions::default()).unwrap();
        let expected = 0.4 * (1.0 / 16.0) / 2.0_f64.sqrt();
        assert!((dt - expected).abs() < 1e-15 * expected);
    }

    #[test]
    fn viscous_limit_scaling() {
        let opts = SchemeOptions::default();
        let g = Grid::square(64, 1.0, BoundaryKind::Periodic).unwrap();
        let s = State::rest(g, 1.0).unwrap();
        let dt1 = stable_dt(&s, &params(1.0, 0.0), &opts).unwrap();
        let dt2 = stable_dt(&s, &params(2.0, 0.0), &opts).unwrap();
        assert!((dt1 / dt2 - 2.0).abs() < 1e-12);
        let fine = State::rest(g.with_resolution(128).unwrap(), 1.0).unwrap();
        let dt3 = stable_dt(&fine, &params(1.0, 0.0), &opts).unwrap();
        assert!((dt1 / dt3 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_with_velocity_collapses() {
        let g = Grid::line(8, 1.0, BoundaryKind::Periodic).unwrap();
        let mut rho = vec![1.0; 8];
        rho[5] = 0.0;
        let mut u = vec![0.0; 8];
        let s = State::new(0.5, ScalarField::new(g, rho.clone()).unwrap(), VectorField::new(g, vec![u.clone()]).unwrap()).unwrap();
        assert!(stable_dt(&s, &params(0.1, 0.0), &SchemeOptions::default()).is_ok());
        u[5] = 0.3;
        let s = State::new(0.5, ScalarField::new(g, rho).unwrap(), VectorField::new(g, vec![u]).unwrap()).unwrap();
        match stable_dt(&s, &params(0.1, 0.0), &SchemeOptions::default()) {
            Err(Error::TimeStepCollapse { cell, time, .. }) => {
                assert_eq!(cell, 5);
                assert_eq!(time, 0.5);
            }
            other => panic!("expected collapse, got {other:?}"),
        }
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        for kind in [BoundaryKind::NoSlip, BoundaryKind::NavierSlip, BoundaryKind::Periodic] {
            let g = Grid::square(12, 1.0, kind).unwrap();
            let s = State::rest(g, 1.0).unwrap();
            let p = params(0.1, 1.0);
            let out = step(&s, 1e-3, &p, &NoForcing, &SchemeOptions::default()).unwrap();
            assert_eq!(out.state.rho, s.rho);
            assert_eq!(out.state.u, s.u);
            assert_eq!(out.clipped_mass, 0.0);
        }
    }

    #[test]
    fn uniform_translation_is_preserved() {
        let g = Grid::square(12, 1.0, BoundaryKind::Periodic).unwrap();
        let s = State::new(
            0.0,
            ScalarField::constant(g, 1.3),
            VectorField::from_fn(g, |_| [0.4, -0.25]).unwrap(),
        )
        .unwrap();
        let out = step(&s, 1e-3, &params(0.1, 0.0), &NoForcing, &SchemeOptions::default()).unwrap();
        for idx in 0..g.len() {
            assert!((out.state.rho.values()[idx] - 1.3).abs() < 1e-15);
            let u = out.state.u.at(idx);
            assert!((u[0] - 0.4).abs() < 1e-15 && (u[1] + 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn ghosts_follow_boundary_kind() {
        let visc = ViscosityParams::new(0.5, 0.0, 2.0).unwrap();
        let slip = Grid::square(10, 1.0, BoundaryKind::NavierSlip).unwrap();
        // Tangential: wall mean and one-sided normal derivative satisfy
        // μ ∂_n u_t + β u_t = 0 at the lower x wall (outer normal −e_x).
        let v = 0.7;
        let gt = ghost(&slip, &visc, 0, Side::Lower, 1, v, 0.0);
        let h = slip.spacing(0);
        let residual = -visc.mu * (v - gt) / h + visc.beta * 0.5 * (v + gt);
        assert!(residual.abs() < 1e-14);
        assert_eq!(ghost(&slip, &visc, 0, Side::Lower, 0, v, 0.0), -v);
        let ns = Grid::square(10, 1.0, BoundaryKind::NoSlip).unwrap();
        assert_eq!(ghost(&ns, &visc, 1, Side::Upper, 0, v, 0.0), -v);
        let per = Grid::square(10, 1.0, BoundaryKind::Periodic).unwrap();
        assert_eq!(ghost(&per, &visc, 1, Side::Upper, 0, v, 0.3), 0.3);
        // β = 0 is a mirror: zero tangential stress.
        let free = ViscosityParams::new(0.5, 0.0, 0.0).unwrap();
        assert_eq!(ghost(&slip, &free, 0, Side::Upper, 1, v, 0.0), v);
    }
}
