//! Smooth comparison pairs `(r, U)` and the analytic families shipped with
//! the crate.
//!
//! Every family is written on the unit box `[0, 1]^d`; the periodic ones
//! assume period 1.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ViscosityParams;

use super::jet::Jet;

/// Which walls a pair's velocity is built to respect.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compatibility {
    /// `U = 0` on every wall; also fine for slip walls.
    NoSlipCompatible,
    /// `U·n = 0` on every wall.
    SlipCompatible,
    /// No wall condition; periodic grids only.
    Unconstrained,
}

/// `r` and `U` as jets at one space-time point.
#[derive(Clone, Copy, Debug)]
pub struct PairJets {
    pub r: Jet,
    pub u: [Jet; 2],
}

pub trait TestPair: Send + Sync + Debug {
    fn name(&self) -> String;

    /// Spatial dimension the pair is written for.
    fn dim(&self) -> usize;

    fn compatibility(&self) -> Compatibility;

    fn jets(&self, t: f64, x: [f64; 2]) -> PairJets;

    fn point(&self, t: f64, x: [f64; 2]) -> PairPoint {
        PairPoint::from_jets(&self.jets(t, x), self.dim())
    }
}

/// Values and derivatives of a pair at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PairPoint {
    pub r: f64,
    pub dt_r: f64,
    pub grad_r: [f64; 2],
    pub u: [f64; 2],
    pub dt_u: [f64; 2],
    /// `grad_u[k][j] = ∂_j U_k`.
    pub grad_u: [[f64; 2]; 2],
    /// `ΔU_k`.
    pub lap_u: [f64; 2],
    /// `∂_k div U`.
    pub grad_div_u: [f64; 2],
}

impl PairPoint {
    pub fn from_jets(j: &PairJets, dim: usize) -> Self {
        let mut p = PairPoint {
            r: j.r.v,
            dt_r: j.r.dt(),
            ..Default::default()
        };
        let gr = j.r.grad();
        for k in 0..dim {
            p.grad_r[k] = gr[k];
            p.u[k] = j.u[k].v;
            p.dt_u[k] = j.u[k].dt();
            let g = j.u[k].grad();
            let h = j.u[k].hess();
            for a in 0..dim {
                p.grad_u[k][a] = g[a];
                p.lap_u[k] += h[a][a];
            }
        }
        for k in 0..dim {
            for a in 0..dim {
                p.grad_div_u[k] += j.u[a].hess()[k][a];
            }
        }
        p
    }

    pub fn div_u(&self, dim: usize) -> f64 {
        (0..dim).map(|a| self.grad_u[a][a]).sum()
    }

    /// `div S(∇U) = μ ΔU + (μ/3 + η) ∇ div U`.
    pub fn div_stress(&self, visc: &ViscosityParams, dim: usize) -> [f64; 2] {
        let mut out = [0.0; 2];
        for k in 0..dim {
            out[k] = visc.mu * self.lap_u[k] + (visc.mu / 3.0 + visc.eta) * self.grad_div_u[k];
        }
        out
    }
}

fn vars(t: f64, x: [f64; 2]) -> (Jet, Jet, Jet) {
    (Jet::var(0, t), Jet::var(1, x[0]), Jet::var(2, x[1]))
}

const ZERO: Jet = Jet::constant(0.0);

/// Constant pair `(r, U)`; with `r = ρ̄`, `U = 0` it reduces every
/// relative functional to its absolute counterpart.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantPair {
    pub dim: usize,
    pub r: f64,
    pub u: [f64; 2],
}

impl ConstantPair {
    pub fn rest(dim: usize, r: f64) -> Self {
        Self {
            dim,
            r,
            u: [0.0; 2],
        }
    }
}

impl TestPair for ConstantPair {
    fn name(&self) -> String {
        "constant".into()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn compatibility(&self) -> Compatibility {
        if self.u == [0.0; 2] {
            Compatibility::NoSlipCompatible
        } else {
            Compatibility::Unconstrained
        }
    }

    fn jets(&self, _t: f64, _x: [f64; 2]) -> PairJets {
        PairJets {
            r: Jet::constant(self.r),
            u: [Jet::constant(self.u[0]), Jet::constant(self.u[1])],
        }
    }
}

/// Steady `r = 1 + A sin 2πx`, `U = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityWave {
    pub dim: usize,
    pub amplitude: f64,
}

impl TestPair for DensityWave {
    fn name(&self) -> String {
        "density_wave".into()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn compatibility(&self) -> Compatibility {
        Compatibility::NoSlipCompatible
    }

    fn jets(&self, t: f64, x: [f64; 2]) -> PairJets {
        let (_, x, _) = vars(t, x);
        PairJets {
            r: 1.0 + (x * (2.0 * PI)).sin() * self.amplitude,
            u: [ZERO, ZERO],
        }
    }
}

/// Time-periodic compressible vortex on the periodic unit square.
///
/// `r = r0 + A cos ωt sin 2πx sin 2πy` and `rU` is a potential part that
/// balances `∂_t r` exactly plus a pulsating Taylor-Green swirl of strength
/// `B`, so the pair satisfies the continuity equation with no source.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicVortex {
    pub r0: f64,
    pub amplitude: f64,
    pub swirl: f64,
    pub omega: f64,
}

impl TestPair for PeriodicVortex {
    fn name(&self) -> String {
        "periodic_vortex".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn compatibility(&self) -> Compatibility {
        Compatibility::Unconstrained
    }

    fn jets(&self, t: f64, x: [f64; 2]) -> PairJets {
        let (t, x, y) = vars(t, x);
        let k = 2.0 * PI;
        let (sx, cx) = ((x * k).sin(), (x * k).cos());
        let (sy, cy) = ((y * k).sin(), (y * k).cos());
        let wt = t * self.omega;
        let r = self.r0 + wt.cos() * sx * sy * self.amplitude;
        let pot = wt.sin() * (self.amplitude * self.omega / (4.0 * PI));
        let swirl = (1.0 + wt.sin() * 0.5) * self.swirl;
        let m0 = -(pot * cx * sy) + swirl * sx * cy;
        let m1 = -(pot * sx * cy) - swirl * cx * sy;
        PairJets {
            r,
            u: [m0 / r, m1 / r],
        }
    }
}

/// Time-periodic compressible vortex in the walled unit square.
///
/// The momentum `rU` vanishes on the walls together with its normal
/// derivative, so the pair is an exact solution under no-slip walls and under
/// Navier-slip walls for every friction coefficient. Continuity holds with no
/// source.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxVortex {
    pub amplitude: f64,
    pub swirl: f64,
    pub omega: f64,
}

impl TestPair for BoxVortex {
    fn name(&self) -> String {
        "box_vortex".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn compatibility(&self) -> Compatibility {
        Compatibility::NoSlipCompatible
    }

    fn jets(&self, t: f64, x: [f64; 2]) -> PairJets {
        let (t, x, y) = vars(t, x);
        let (sx, cx) = ((x * PI).sin(), (x * PI).cos());
        let (sy, cy) = ((y * PI).sin(), (y * PI).cos());
        let wt = t * self.omega;
        // ∂_x (sin²πx sin²πy) = π sin 2πx sin²πy.
        let phi = (x * (2.0 * PI)).sin() * sy * sy * PI;
        let r = 1.0 + wt.cos() * phi * self.amplitude;
        let pot = wt.sin() * (self.amplitude * self.omega) * sx * sx * sy * sy;
        // ∇⊥ of ψ = sin³πx sin³πy.
        let swirl = (1.0 + wt.sin() * 0.5) * (3.0 * PI * self.swirl);
        let m0 = pot + swirl * sx.powi(3) * sy * sy * cy;
        let m1 = -(swirl * sx * sx * cx * sy.powi(3));
        PairJets {
            r,
            u: [m0 / r, m1 / r],
        }
    }
}

/// Slip-compatible cellular flow `U·n = 0` with nonzero tangential wall
/// velocity. Used as a comparison pair, not as a solution.
#[derive(Clone, Debug, PartialEq)]
pub struct SlipCell {
    pub amplitude: f64,
    pub speed: f64,
    pub omega: f64,
}

impl TestPair for SlipCell {
    fn name(&self) -> String {
        "slip_cell".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn compatibility(&self) -> Compatibility {
        Compatibility::SlipCompatible
    }

    fn jets(&self, t: f64, x: [f64; 2]) -> PairJets {
        let (t, x, y) = vars(t, x);
        let (sx, cx) = ((x * PI).sin(), (x * PI).cos());
        let (sy, cy) = ((y * PI).sin(), (y * PI).cos());
        let wt = t * self.omega;
        let r = 1.0 + wt.cos() * cx * cy * self.amplitude;
        let s = (1.0 + wt.sin() * 0.5) * self.speed;
        PairJets {
            r,
            u: [s * sx * cy, -(s * cx * sy)],
        }
    }
}

/// Divergence-free cell flow with slip walls, `r = 1`, `U = ∇⊥ψ` with
/// `ψ = σ(t) V X(x) X(y) / X(½)²`, `X(s) = s(1 − s)(1 + κ s(1 − s))` and
/// `σ(t) = 1 + ½ sin ωt`.
///
/// `κ = 1 + β/(2μ)` makes `U` satisfy the Navier friction condition
/// `(S n)_tan + β U_tan = 0` on every wall, so the pair is an exact solution
/// under Navier-slip walls with that `β` while keeping a nonzero tangential
/// wall velocity.
#[derive(Clone, Debug, PartialEq)]
pub struct NavierCell {
    pub speed: f64,
    pub omega: f64,
    pub kappa: f64,
}

impl NavierCell {
    pub fn new(speed: f64, omega: f64, visc: &ViscosityParams) -> Self {
        Self {
            speed,
            omega,
            kappa: 1.0 + visc.beta / (2.0 * visc.mu),
        }
    }

    /// `(X, X′)`.
    fn profile(&self, s: Jet) -> (Jet, Jet) {
        let w = s * (1.0 - s);
        (w + w * w * self.kappa, (1.0 - s * 2.0) * (1.0 + w * (2.0 * self.kappa)))
    }
}

impl TestPair for NavierCell {
    fn name(&self) -> String {
        "navier_cell".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn compatibility(&self) -> Compatibility {
        Compatibility::SlipCompatible
    }

    fn jets(&self, t: f64, x: [f64; 2]) -> PairJets {
        let (t, x, y) = vars(t, x);
        let mid = 0.25 * (1.0 + 0.25 * self.kappa);
        let sigma = (1.0 + (t * self.omega).sin() * 0.5) * (self.speed / (mid * mid));
        let (fx, dfx) = self.profile(x);
        let (fy, dfy) = self.profile(y);
        PairJets {
            r: Jet::constant(1.0),
            u: [sigma * fx * dfy, -(sigma * dfx * fy)],
        }
    }
}

/// Shear layer `r = 1 + ε sin 2πx`, `U = (V sin 2πy, 0)` on the periodic
/// square; steady, used for initial data.
#[derive(Clone, Debug, PartialEq)]
pub struct ShearLayer {
    pub speed: f64,
    pub density_amplitude: f64,
}

impl TestPair for ShearLayer {
    fn name(&self) -> String {
        "shear_layer".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn compatibility(&self) -> Compatibility {
        Compatibility::Unconstrained
    }

    fn jets(&self, t: f64, x: [f64; 2]) -> PairJets {
        let (_, x, y) = vars(t, x);
        PairJets {
            r: 1.0 + (x * (2.0 * PI)).sin() * self.density_amplitude,
            u: [(y * (2.0 * PI)).sin() * self.speed, ZERO],
        }
    }
}

/// `r = 1`, `U = σ(t)(sin πx sin πy, 0)` with `σ(t) = 1 + ½ sin 2πt`.
#[derive(Clone, Debug, PartialEq)]
pub struct WallBump {
    pub speed: f64,
}

impl TestPair for WallBump {
    fn name(&self) -> String {
        "wall_bump".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn compatibility(&self) -> Compatibility {
        Compatibility::NoSlipCompatible
    }

    fn jets(&self, t: f64, x: [f64; 2]) -> PairJets {
        let (t, x, y) = vars(t, x);
        let sigma = 1.0 + (t * (2.0 * PI)).sin() * 0.5;
        PairJets {
            r: Jet::constant(1.0),
            u: [sigma * (x * PI).sin() * (y * PI).sin() * self.speed, ZERO],
        }
    }
}

/// Named pair family with its parameters, as written in experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSpec {
    /// `(ρ̄, 0)`; `rho` overrides the reference density.
    Equilibrium {
        #[serde(default)]
        rho: Option<f64>,
    },
    DensityWave {
        #[serde(default = "defaults::density_wave_amplitude")]
        amplitude: f64,
    },
    PeriodicVortex {
        #[serde(default = "defaults::one")]
        r0: f64,
        #[serde(default = "defaults::vortex_amplitude")]
        amplitude: f64,
        #[serde(default = "defaults::vortex_swirl")]
        swirl: f64,
        #[serde(default = "defaults::two_pi")]
        omega: f64,
    },
    BoxVortex {
        #[serde(default = "defaults::box_amplitude")]
        amplitude: f64,
        #[serde(default = "defaults::box_swirl")]
        swirl: f64,
        #[serde(default = "defaults::two_pi")]
        omega: f64,
    },
    SlipCell {
        #[serde(default = "defaults::slip_amplitude")]
        amplitude: f64,
        #[serde(default = "defaults::slip_speed")]
        speed: f64,
        #[serde(default = "defaults::two_pi")]
        omega: f64,
    },
    ShearLayer {
        #[serde(default = "defaults::shear_speed")]
        speed: f64,
        #[serde(default = "defaults::shear_density")]
        density_amplitude: f64,
    },
    WallBump {
        #[serde(default = "defaults::slip_speed")]
        speed: f64,
    },
    /// Its friction shape follows the run's `μ` and `β`.
    NavierCell {
        #[serde(default = "defaults::navier_speed")]
        speed: f64,
        #[serde(default = "defaults::two_pi")]
        omega: f64,
    },
}

mod defaults {
    pub fn one() -> f64 {
        1.0
    }
    pub fn two_pi() -> f64 {
        2.0 * std::f64::consts::PI
    }
    pub fn density_wave_amplitude() -> f64 {
        0.25
    }
    pub fn vortex_amplitude() -> f64 {
        0.2
    }
    pub fn vortex_swirl() -> f64 {
        0.5
    }
    pub fn box_amplitude() -> f64 {
        0.1
    }
    pub fn box_swirl() -> f64 {
        0.5
    }
    pub fn slip_amplitude() -> f64 {
        0.1
    }
    pub fn slip_speed() -> f64 {
        0.3
    }
    pub fn shear_speed() -> f64 {
        0.5
    }
    pub fn shear_density() -> f64 {
        0.1
    }
    pub fn navier_speed() -> f64 {
        0.1
    }
}

impl PairSpec {
    /// Instantiates the family for a `dim`-dimensional run; `rho_bar` is the
    /// equilibrium density and `visc` shapes the Navier cell.
    pub fn build(&self, dim: usize, rho_bar: f64, visc: &ViscosityParams) -> Result<Arc<dyn TestPair>> {
        let two_d = |name: &str| {
            if dim == 2 {
                Ok(())
            } else {
                Err(Error::Config(format!("pair family `{name}` is two-dimensional")))
            }
        };
        Ok(match *self {
            PairSpec::Equilibrium { rho } => Arc::new(ConstantPair::rest(dim, rho.unwrap_or(rho_bar))),
            PairSpec::DensityWave { amplitude } => Arc::new(DensityWave { dim, amplitude }),
            PairSpec::PeriodicVortex {
                r0,
                amplitude,
                swirl,
                omega,
            } => {
                two_d("periodic_vortex")?;
                Arc::new(PeriodicVortex {
                    r0,
                    amplitude,
                    swirl,
                    omega,
                })
            }
            PairSpec::BoxVortex {
                amplitude,
                swirl,
                omega,
            } => {
                two_d("box_vortex")?;
                Arc::new(BoxVortex {
                    amplitude,
                    swirl,
                    omega,
                })
            }
            PairSpec::SlipCell {
                amplitude,
                speed,
                omega,
            } => {
                two_d("slip_cell")?;
                Arc::new(SlipCell {
                    amplitude,
                    speed,
                    omega,
                })
            }
            PairSpec::ShearLayer {
                speed,
                density_amplitude,
            } => {
                two_d("shear_layer")?;
                Arc::new(ShearLayer {
                    speed,
                    density_amplitude,
                })
            }
            PairSpec::WallBump { speed } => {
                two_d("wall_bump")?;
                Arc::new(WallBump { speed })
            }
            PairSpec::NavierCell { speed, omega } => {
                two_d("navier_cell")?;
                Arc::new(NavierCell::new(speed, omega, visc))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Continuity residual `∂_t r + div(rU)` by central differences of the
    /// plain values, independent of the jet derivatives.
    fn continuity_residual_fd(pair: &dyn TestPair, t: f64, x: [f64; 2]) -> f64 {
        let e = 1e-5;
        let val = |t: f64, x: [f64; 2]| {
            let j = pair.jets(t, x);
            (j.r.v, [j.r.v * j.u[0].v, j.r.v * j.u[1].v])
        };
        let dt = (val(t + e, x).0 - val(t - e, x).0) / (2.0 * e);
        let dx = (val(t, [x[0] + e, x[1]]).1[0] - val(t, [x[0] - e, x[1]]).1[0]) / (2.0 * e);
        let dy = (val(t, [x[0], x[1] + e]).1[1] - val(t, [x[0], x[1] - e]).1[1]) / (2.0 * e);
        dt + dx + dy
    }

    #[test]
    fn vortices_conserve_mass_without_source() {
        let pv = PeriodicVortex {
            r0: 1.0,
            amplitude: 0.2,
            swirl: 0.5,
            omega: 2.0 * PI,
        };
        let bv = BoxVortex {
            amplitude: 0.1,
            swirl: 0.5,
            omega: 2.0 * PI,
        };
        for pair in [&pv as &dyn TestPair, &bv] {
            for (t, x) in [(0.1, [0.2, 0.7]), (0.37, [0.9, 0.05]), (1.3, [0.5, 0.5])] {
                let res = continuity_residual_fd(pair, t, x);
                assert!(res.abs() < 1e-8, "{}: {res}", pair.name());
            }
        }
    }

    #[test]
    fn box_vortex_vanishes_to_second_order_on_walls() {
        let bv = BoxVortex {
            amplitude: 0.1,
            swirl: 0.5,
            omega: 2.0 * PI,
        };
        for s in [0.13, 0.5, 0.81] {
            for (x, axis) in [([0.0, s], 0), ([1.0, s], 0), ([s, 0.0], 1), ([s, 1.0], 1)] {
                let p = bv.point(0.3, x);
                for k in 0..2 {
                    assert!(p.u[k].abs() < 1e-14);
                    assert!(p.grad_u[k][axis].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn slip_cell_is_tangential_on_walls() {
        let sc = SlipCell {
            amplitude: 0.1,
            speed: 0.3,
            omega: 1.0,
        };
        for s in [0.2, 0.6] {
            assert!(sc.point(0.4, [0.0, s]).u[0].abs() < 1e-15);
            assert!(sc.point(0.4, [1.0, s]).u[0].abs() < 1e-15);
            assert!(sc.point(0.4, [s, 0.0]).u[1].abs() < 1e-15);
            assert!(sc.point(0.4, [s, 1.0]).u[1].abs() < 1e-15);
            assert!(sc.point(0.4, [0.0, s]).u[1].abs() > 1e-3);
        }
    }

    #[test]
    fn navier_cell_satisfies_friction_condition() {
        for beta in [0.0, 1.0, 3.0] {
            let visc = ViscosityParams::new(0.02, 0.01, beta).unwrap();
            let pair = NavierCell::new(0.5, 2.0 * PI, &visc);
            let (mu, t) = (visc.mu, 0.3);
            for s in [0.17, 0.5, 0.9] {
                // (wall point, axis, outward normal sign)
                for (x, axis, n) in [([0.0, s], 0, -1.0), ([1.0, s], 0, 1.0), ([s, 0.0], 1, -1.0), ([s, 1.0], 1, 1.0)] {
                    let p = pair.point(t, x);
                    let tan = 1 - axis;
                    assert!(p.u[axis].abs() < 1e-15);
                    let shear = mu * (p.grad_u[tan][axis] + p.grad_u[axis][tan]);
                    let residual = n * shear + beta * p.u[tan];
                    assert!(residual.abs() < 1e-12, "beta={beta} at {x:?}: {residual}");
                    assert!(p.u[tan].abs() > 1e-3);
                }
            }
            for (t, x) in [(0.1, [0.3, 0.7]), (0.8, [0.05, 0.5])] {
                assert!(pair.point(t, x).div_u(2).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn div_stress_of_linear_field_vanishes() {
        let p = PairPoint {
            r: 1.0,
            grad_u: [[0.5, -1.0], [2.0, 0.25]],
            ..Default::default()
        };
        let visc = ViscosityParams::new(1.0, 0.5, 0.0).unwrap();
        assert_eq!(p.div_stress(&visc, 2), [0.0, 0.0]);
    }

    #[test]
    fn spec_round_trips_through_toml() {
        let spec: PairSpec = toml::from_str("family = \"box_vortex\"\namplitude = 0.05\n").unwrap();
        assert_eq!(
            spec,
            PairSpec::BoxVortex {
                amplitude: 0.05,
                swirl: 0.5,
                omega: 2.0 * PI
            }
        );
        assert!(toml::from_str::<PairSpec>("family = \"box_vortex\"\nbogus = 1.0\n").is_err());
        let visc = ViscosityParams::new(0.1, 0.0, 0.0).unwrap();
        assert!(spec.build(1, 1.0, &visc).is_err());
    }
}
