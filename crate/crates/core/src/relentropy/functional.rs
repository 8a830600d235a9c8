//! Relative entropy, relative dissipation and the remainder, integrated by
//! the midpoint rule on cell centres.
//!
//! The state enters through its cell values and the discrete gradient
//! `∇_h u`; the pair enters through exact values and derivatives. Wall
//! integrals use the velocity extrapolated linearly from the two cells next to
//! the wall and are evaluated only on Navier-slip sides.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{gradient, BoundaryKind, Grid, Side, TensorField, ViscosityParams};
use crate::numerics::compensated_sum;
use crate::solver::{check_compatible, FluidParams, Forcing, State};
use crate::thermo::Isentropic;

use super::gronwall::gronwall_weight;
use super::pair::{PairPoint, TestPair};
use super::{DiagnosticsRecord, RemainderBreakdown};

/// One boundary face of a Navier-slip wall.
#[derive(Clone, Copy, Debug)]
pub(crate) struct WallFace {
    axis: usize,
    /// Cell next to the wall, then the one behind it.
    cells: [usize; 2],
    area: f64,
    /// Tangential part of `U` at the face centre.
    pair_u: [f64; 2],
}

/// The pair sampled where the functionals need it.
pub(crate) struct PairSamples {
    pub cells: Vec<PairPoint>,
    pub walls: Vec<WallFace>,
}

impl PairSamples {
    pub fn new(pair: &dyn TestPair, grid: &Grid, t: f64) -> Result<Self> {
        check_compatible(pair, grid)?;
        let d = grid.dim();
        let cells: Vec<PairPoint> = (0..grid.len())
            .into_par_iter()
            .map(|idx| pair.point(t, grid.center_of(idx)))
            .collect();
        if let Some((idx, p)) = cells
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.r > 0.0) || !p.r.is_finite())
        {
            return Err(Error::Admissibility(format!(
                "pair `{}` has r = {} at cell {idx}, t = {t}",
                pair.name(),
                p.r
            )));
        }
        let mut walls = Vec::new();
        for axis in 0..d {
            for side in Side::BOTH {
                if grid.boundary(axis, side) != BoundaryKind::NavierSlip {
                    continue;
                }
                let n = grid.cells(axis);
                let (c0, c1) = match side {
                    Side::Lower => (0, 1),
                    Side::Upper => (n - 1, n - 2),
                };
                let other = if d == 2 { grid.cells(1 - axis) } else { 1 };
                for m in 0..other {
                    let at = |c: usize| if axis == 0 { grid.index(c, m) } else { grid.index(m, c) };
                    let mut x = grid.center_of(at(c0));
                    x[axis] = grid.wall(axis, side);
                    let u = pair.point(t, x).u;
                    let mut pair_u = [0.0; 2];
                    for k in (0..d).filter(|&k| k != axis) {
                        pair_u[k] = u[k];
                    }
                    walls.push(WallFace {
                        axis,
                        cells: [at(c0), at(c1)],
                        area: grid.face_area(axis),
                        pair_u,
                    });
                }
            }
        }
        Ok(Self { cells, walls })
    }
}

/// Tangential wall velocity from linear extrapolation.
#[inline]
fn wall_velocity(s: &State, w: &WallFace) -> [f64; 2] {
    let d = s.grid().dim();
    let mut out = [0.0; 2];
    for k in (0..d).filter(|&k| k != w.axis) {
        let u = s.u.component(k);
        out[k] = 1.5 * u[w.cells[0]] - 0.5 * u[w.cells[1]];
    }
    out
}

#[inline]
fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn diff(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

/// `∫ ½ρ|u − U|² + bregman(ρ, r)` with `(r, U)` supplied per cell.
fn energy_integral(s: &State, law: &Isentropic, pair: impl Fn(usize) -> (f64, [f64; 2])) -> f64 {
    let dv = s.grid().cell_volume();
    let rho = s.rho.values();
    compensated_sum((0..rho.len()).map(|idx| {
        let (r, big_u) = pair(idx);
        let w = diff(s.u.at(idx), big_u);
        (0.5 * rho[idx] * dot(w, w) + law.energy_gap(rho[idx], r)) * dv
    }))
}

/// `∫ S(∇u − G) : (∇u − G)` with `G` supplied per cell.
fn bulk_dissipation(grad: &TensorField, visc: &ViscosityParams, pair: impl Fn(usize) -> [[f64; 2]; 2]) -> f64 {
    let g = grad.grid();
    let d = g.dim();
    let dv = g.cell_volume();
    compensated_sum((0..g.len()).map(|idx| {
        let big = pair(idx);
        let mut w = grad.at(idx);
        for (row, brow) in w.iter_mut().zip(big) {
            for (x, b) in row.iter_mut().zip(brow) {
                *x -= b;
            }
        }
        visc.pairing_at(&w, &w, d) * dv
    }))
}

/// `β ∮ |u − U|²` over Navier-slip walls.
fn friction_dissipation(s: &State, walls: &[WallFace], beta: f64, pair: impl Fn(&WallFace) -> [f64; 2]) -> f64 {
    beta * compensated_sum(walls.iter().map(|w| {
        let v = diff(wall_velocity(s, w), pair(w));
        dot(v, v) * w.area
    }))
}

/// `∫ ρ f · (u − U)`.
fn force_integral(s: &State, forces: &[[f64; 2]], pair: impl Fn(usize) -> [f64; 2]) -> f64 {
    let dv = s.grid().cell_volume();
    let rho = s.rho.values();
    compensated_sum(
        (0..rho.len()).map(|idx| rho[idx] * dot(forces[idx], diff(s.u.at(idx), pair(idx))) * dv),
    )
}

fn body_forces(s: &State, forcing: &dyn Forcing) -> Vec<[f64; 2]> {
    let g = *s.grid();
    (0..g.len())
        .into_par_iter()
        .map(|idx| forcing.body_force(s.time, g.center_of(idx)))
        .collect()
}

fn remainder_terms(
    s: &State,
    grad: &TensorField,
    samples: &PairSamples,
    forces: &[[f64; 2]],
    params: &FluidParams,
) -> RemainderBreakdown {
    let g = s.grid();
    let d = g.dim();
    let dv = g.cell_volume();
    let law = &params.law;
    let visc = &params.viscosity;
    let rho = s.rho.values();
    let terms: Vec<[f64; 4]> = (0..g.len())
        .map(|idx| {
            let p = &samples.cells[idx];
            let u = s.u.at(idx);
            let gu = grad.at(idx);
            let w = diff(p.u, u);
            // ρ(∂_t U + u·∇U)·(U − u)
            let mut acc = [0.0; 2];
            for k in 0..d {
                acc[k] = p.dt_u[k];
                for j in 0..d {
                    acc[k] += u[j] * p.grad_u[k][j];
                }
            }
            let convective = rho[idx] * dot(acc, w);
            // S(∇U) : ∇(U − u)
            let mut gw = [[0.0; 2]; 2];
            for k in 0..d {
                for j in 0..d {
                    gw[k][j] = p.grad_u[k][j] - gu[k][j];
                }
            }
            let viscous = visc.pairing_at(&p.grad_u, &gw, d);
            // (r − ρ)∂_t H′(r) + ∇H′(r)·(rU − ρu), with ∂H′(r) = H″(r)∂r.
            let h2 = law.dp(p.r) / p.r;
            let mut flux = [0.0; 2];
            for k in 0..d {
                flux[k] = p.r * p.u[k] - rho[idx] * u[k];
            }
            let entropy = (p.r - rho[idx]) * (h2 * p.dt_r)
                + dot([h2 * p.grad_r[0], h2 * p.grad_r[1]], flux);
            let pressure = -p.div_u(d) * (law.p(rho[idx]) - law.p(p.r));
            [convective * dv, viscous * dv, entropy * dv, pressure * dv]
        })
        .collect();
    let column = |c: usize| compensated_sum(terms.iter().map(|t| t[c]));
    let force = force_integral(s, forces, |idx| samples.cells[idx].u);
    let beta = visc.beta;
    let friction = -beta
        * compensated_sum(samples.walls.iter().map(|w| {
            dot(w.pair_u, diff(wall_velocity(s, w), w.pair_u)) * w.area
        }));
    RemainderBreakdown::from_terms(column(0), column(1), force, column(2), column(3), friction)
}

fn reference(params: &FluidParams) -> (f64, [f64; 2]) {
    (params.rho_bar(), [0.0; 2])
}

/// `E[ρ, u] = ∫ ½ρ|u|² + H(ρ) − H′(ρ̄)(ρ − ρ̄) − H(ρ̄)`.
pub fn total_energy(s: &State, params: &FluidParams) -> f64 {
    let rf = reference(params);
    energy_integral(s, &params.law, |_| rf)
}

/// `E([ρ, u] | [r, U])` at the state's time.
pub fn relative_entropy(s: &State, pair: &dyn TestPair, law: &Isentropic) -> Result<f64> {
    let samples = PairSamples::new(pair, s.grid(), s.time)?;
    Ok(energy_integral(s, law, |idx| {
        let p = &samples.cells[idx];
        (p.r, p.u)
    }))
}

/// `∫ S(∇u − ∇U) : (∇u − ∇U) + β∮|u − U|²`.
pub fn relative_dissipation(s: &State, pair: &dyn TestPair, params: &FluidParams) -> Result<f64> {
    let samples = PairSamples::new(pair, s.grid(), s.time)?;
    let grad = gradient(&s.u)?;
    let visc = &params.viscosity;
    Ok(bulk_dissipation(&grad, visc, |idx| samples.cells[idx].grad_u)
        + friction_dissipation(s, &samples.walls, visc.beta, |w| w.pair_u))
}

/// The remainder `R(ρ, u, r, U)` term by term; `forcing` supplies the body
/// force acting on the state.
pub fn remainder(
    s: &State,
    pair: &dyn TestPair,
    params: &FluidParams,
    forcing: &dyn Forcing,
) -> Result<RemainderBreakdown> {
    let samples = PairSamples::new(pair, s.grid(), s.time)?;
    let grad = gradient(&s.u)?;
    let forces = body_forces(s, forcing);
    Ok(remainder_terms(s, &grad, &samples, &forces, params))
}

/// Evaluates every per-frame diagnostic of a run against one pair.
#[derive(Clone)]
pub struct Diagnostics {
    pair: Arc<dyn TestPair>,
    params: FluidParams,
    forcing: Arc<dyn Forcing>,
    gronwall_k: f64,
}

impl Diagnostics {
    pub fn new(
        pair: Arc<dyn TestPair>,
        params: FluidParams,
        forcing: Arc<dyn Forcing>,
        gronwall_k: f64,
    ) -> Result<Self> {
        if !(gronwall_k >= 0.0 && gronwall_k.is_finite()) {
            return Err(Error::Domain(format!("Gronwall constant K = {gronwall_k} must be >= 0")));
        }
        Ok(Self {
            pair,
            params,
            forcing,
            gronwall_k,
        })
    }

    pub fn pair(&self) -> &Arc<dyn TestPair> {
        &self.pair
    }

    /// One row of instantaneous diagnostics; the running columns stay zero
    /// until the trajectory is assembled.
    pub fn record(&self, s: &State, clipped_mass: f64) -> Result<DiagnosticsRecord> {
        let grid = s.grid();
        let samples = PairSamples::new(self.pair.as_ref(), grid, s.time)?;
        let grad = gradient(&s.u)?;
        let forces = body_forces(s, self.forcing.as_ref());
        let law = &self.params.law;
        let visc = &self.params.viscosity;
        let zero_grad = [[0.0; 2]; 2];
        let rf = reference(&self.params);

        let energy = energy_integral(s, law, |_| rf);
        let rel_entropy = energy_integral(s, law, |idx| {
            let p = &samples.cells[idx];
            (p.r, p.u)
        });
        let energy_dissipation = bulk_dissipation(&grad, visc, |_| zero_grad)
            + friction_dissipation(s, &samples.walls, visc.beta, |_| [0.0; 2]);
        let dissipation = bulk_dissipation(&grad, visc, |idx| samples.cells[idx].grad_u)
            + friction_dissipation(s, &samples.walls, visc.beta, |w| w.pair_u);
        let power = force_integral(s, &forces, |_| [0.0; 2]);
        let remainder = remainder_terms(s, &grad, &samples, &forces, &self.params);
        let gronwall_h = self.gronwall_k * gronwall_weight(&samples.cells, grid, &self.params)?;
        Ok(DiagnosticsRecord {
            time: s.time,
            mass: s.mass(),
            energy,
            energy_dissipation,
            power,
            dissipation,
            rel_entropy,
            remainder,
            rei_residual: 0.0,
            energy_residual: 0.0,
            gronwall_h,
            gronwall_env: 0.0,
            clipped_mass,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ScalarField, VectorField};
    use crate::relentropy::{ConstantPair, DensityWave};
    use crate::solver::NoForcing;

    struct Uniform([f64; 2]);

    impl Forcing for Uniform {
        fn body_force(&self, _t: f64, _x: [f64; 2]) -> [f64; 2] {
            self.0
        }
    }

    fn params(gamma: f64, beta: f64) -> FluidParams {
        FluidParams::new(
            ViscosityParams::new(0.1, 0.05, beta).unwrap(),
            Isentropic::new(1.0, gamma, 1.0).unwrap(),
        )
        .unwrap()
    }

    fn wavy_state(grid: Grid) -> State {
        let rho = ScalarField::from_fn(grid, |x| 1.0 + 0.3 * (6.0 * x[0]).sin() * x[1]).unwrap();
        let u = VectorField::from_fn(grid, |x| [x[1] * (1.0 - x[1]) + 0.2, (3.0 * x[0]).cos()]).unwrap();
        State::new(0.3, rho, u).unwrap()
    }

    #[test]
    fn uniform_compression_against_rest() {
        let p = params(2.0, 0.0);
        let g = Grid::square(8, 1.0, BoundaryKind::Periodic).unwrap();
        let s = State::rest(g, 2.0).unwrap();
        let e = relative_entropy(&s, &ConstantPair::rest(2, 1.0), &p.law).unwrap();
        assert!((e - 1.0).abs() < 1e-12, "{e}");
        assert!((total_energy(&s, &p) - 1.0).abs() < 1e-12);
        assert_eq!(relative_entropy(&s, &ConstantPair::rest(2, 2.0), &p.law).unwrap(), 0.0);
    }

    #[test]
    fn kinetic_energy_of_unit_flow() {
        let p = params(5.0 / 3.0, 0.0);
        let g = Grid::square(8, 1.0, BoundaryKind::Periodic).unwrap();
        let u = VectorField::from_fn(g, |_| [1.0, 0.0]).unwrap();
        let s = State::new(0.0, ScalarField::constant(g, 1.0), u).unwrap();
        assert!((total_energy(&s, &p) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rest_pair_reproduces_total_energy_bitwise() {
        let p = params(5.0 / 3.0, 0.7);
        let g = Grid::square(12, 1.0, BoundaryKind::NavierSlip).unwrap();
        let s = wavy_state(g);
        let e = relative_entropy(&s, &ConstantPair::rest(2, p.rho_bar()), &p.law).unwrap();
        assert_eq!(e.to_bits(), total_energy(&s, &p).to_bits());
        assert!(e > 0.0);
    }

    #[test]
    fn rest_pair_remainder_is_the_power() {
        let p = params(1.8, 0.5);
        let g = Grid::square(10, 1.0, BoundaryKind::NavierSlip).unwrap();
        let s = wavy_state(g);
        let f = Uniform([0.4, -1.1]);
        let rem = remainder(&s, &ConstantPair::rest(2, 1.0), &p, &f).unwrap();
        let dv = g.cell_volume();
        let power = compensated_sum((0..g.len()).map(|k| {
            let u = s.u.at(k);
            s.rho.values()[k] * (0.4 * u[0] - 1.1 * u[1]) * dv
        }));
        assert!((rem.force - power).abs() < 1e-14);
        for t in [rem.convective, rem.viscous, rem.entropy, rem.pressure, rem.friction] {
            assert_eq!(t, 0.0);
        }
        assert_eq!(rem.total, rem.force);
    }

    #[test]
    fn shifted_uniform_flow_leaves_only_the_force_term() {
        let p = params(2.0, 0.0);
        let g = Grid::line(16, 1.0, BoundaryKind::Periodic).unwrap();
        let pair = ConstantPair { dim: 1, r: 1.3, u: [0.25, 0.0] };
        let u = VectorField::from_fn(g, |_| [0.25 + 0.1, 0.0]).unwrap();
        let s = State::new(0.0, ScalarField::constant(g, 1.3), u).unwrap();
        let rem = remainder(&s, &pair, &p, &Uniform([2.0, 0.0])).unwrap();
        assert!((rem.total - rem.force).abs() < 1e-15);
        assert!((rem.force - 1.3 * 2.0 * 0.1).abs() < 1e-13);
    }

    #[test]
    fn breakdown_sums_to_total() {
        let p = params(5.0 / 3.0, 0.3);
        let g = Grid::square(12, 1.0, BoundaryKind::Periodic).unwrap();
        let s = wavy_state(g);
        let pair = DensityWave { dim: 2, amplitude: 0.25 };
        let r = remainder(&s, &pair, &p, &Uniform([0.2, 0.1])).unwrap();
        let sum = r.convective + r.viscous + r.force + r.entropy + r.pressure + r.friction;
        assert!((sum - r.total).abs() <= 1e-12 * sum.abs().max(1e-300));
    }

    #[test]
    fn zero_pair_friction_is_the_plain_wall_dissipation() {
        let p = params(5.0 / 3.0, 2.0);
        let g = Grid::square(10, 1.0, BoundaryKind::NavierSlip).unwrap();
        let s = wavy_state(g);
        let rest = ConstantPair::rest(2, 1.0);
        let samples = PairSamples::new(&rest, &g, s.time).unwrap();
        let with_pair = friction_dissipation(&s, &samples.walls, 2.0, |w| w.pair_u);
        let plain = friction_dissipation(&s, &samples.walls, 2.0, |_| [0.0; 2]);
        assert_eq!(with_pair, plain);
        assert!(plain > 0.0);
        let rem = remainder(&s, &rest, &p, &NoForcing).unwrap();
        assert_eq!(rem.friction, 0.0);
    }

    #[test]
    fn no_slip_grids_have_no_friction() {
        let p = params(5.0 / 3.0, 2.0);
        let g = Grid::square(10, 1.0, BoundaryKind::NoSlip).unwrap();
        let s = State::rest(g, 1.0).unwrap();
        let samples = PairSamples::new(&ConstantPair::rest(2, 1.0), &g, 0.0).unwrap();
        assert!(samples.walls.is_empty());
        let rem = remainder(&s, &ConstantPair::rest(2, 1.0), &p, &NoForcing).unwrap();
        assert_eq!(rem.friction, 0.0);
    }

    #[test]
    fn relative_entropy_vanishes_only_on_the_pair() {
        let p = params(5.0 / 3.0, 0.0);
        let g = Grid::square(12, 1.0, BoundaryKind::Periodic).unwrap();
        let pair = DensityWave { dim: 2, amplitude: 0.25 };
        let s = State::sample(&pair, g, 0.2).unwrap();
        assert!(relative_entropy(&s, &pair, &p.law).unwrap().abs() < 1e-10);
        let off = State::new(s.time, s.rho.clone(), VectorField::from_fn(g, |_| [1e-3, 0.0]).unwrap()).unwrap();
        assert!(relative_entropy(&off, &pair, &p.law).unwrap() > 0.0);
    }

    #[test]
    fn nonpositive_pair_density_is_inadmissible() {
        let p = params(5.0 / 3.0, 0.0);
        let g = Grid::square(8, 1.0, BoundaryKind::Periodic).unwrap();
        let s = State::rest(g, 1.0).unwrap();
        let err = relative_entropy(&s, &ConstantPair::rest(2, 0.0), &p.law).unwrap_err();
        assert!(matches!(err, Error::Admissibility(_)));
    }
}
