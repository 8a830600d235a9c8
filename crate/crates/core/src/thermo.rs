//! Barotropic pressure laws, the pressure potential
//! `H(ρ) = ρ ∫_{ρ̄}^{ρ} p(z)/z² dz` and its Bregman gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A pressure law `p(ρ)` with `p(0) = 0` and `p′ > 0`, together with its
/// potential relative to the reference density `ρ̄`.
pub trait PressureLaw {
    fn rho_bar(&self) -> f64;

    /// `p(ρ)`, for `ρ ≥ 0`.
    fn pressure(&self, rho: f64) -> Result<f64>;

    /// `p′(ρ)`, for `ρ ≥ 0`.
    fn dpressure(&self, rho: f64) -> Result<f64>;

    /// `H(ρ)`; `ρ = 0` takes the continuous extension.
    fn potential(&self, rho: f64) -> Result<f64>;

    /// `H′(ρ)`, for `ρ > 0`.
    fn dpotential(&self, rho: f64) -> Result<f64>;

    /// `H″(ρ) = p′(ρ)/ρ`, for `ρ > 0`.
    fn d2potential(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("H'' needs rho > 0, got {rho}")));
        }
        Ok(self.dpressure(rho)? / rho)
    }

    /// `H(ρ) − H′(r)(ρ − r) − H(r)`.
    fn bregman(&self, rho: f64, r: f64) -> Result<f64> {
        check_bregman_args(rho, r)?;
        Ok(self.potential(rho)? - self.dpotential(r)? * (rho - r) - self.potential(r)?)
    }
}

fn check_bregman_args(rho: f64, r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("Bregman gap needs r > 0, got {r}")));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("density must be >= 0, got {rho}")));
    }
    Ok(())
}

/// Isentropic law `p(ρ) = a ρ^γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Isentropic {
    pub a: f64,
    pub gamma: f64,
    pub rho_bar: f64,
}

impl Isentropic {
    pub fn new(a: f64, gamma: f64, rho_bar: f64) -> Result<Self> {
        let law = Self { a, gamma, rho_bar };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Domain(format!("pressure coefficient a = {} must be > 0", self.a)));
        }
        if !(self.gamma > 1.5 && self.gamma.is_finite()) {
            return Err(Error::Domain(format!(
                "adiabatic exponent gamma = {} must exceed 3/2",
                self.gamma
            )));
        }
        if !(self.rho_bar >= 0.0 && self.rho_bar.is_finite()) {
            return Err(Error::Domain(format!("rho_bar = {} must be >= 0", self.rho_bar)));
        }
        Ok(())
    }

    /// Exponent `q = 6γ/(5γ − 6)` of the `L^q` norm in the Gronwall weight.
    pub fn gronwall_q(&self) -> f64 {
        6.0 * self.gamma / (5.0 * self.gamma - 6.0)
    }

    #[inline]
    pub(crate) fn p(&self, rho: f64) -> f64 {
        self.a * rho.powf(self.gamma)
    }

    #[inline]
    pub(crate) fn dp(&self, rho: f64) -> f64 {
        self.a * self.gamma * rho.powf(self.gamma - 1.0)
    }

    #[inline]
    pub(crate) fn h(&self, rho: f64) -> f64 {
        let g1 = self.gamma - 1.0;
        if rho == 0.0 {
            0.0
        } else if self.rho_bar == 0.0 {
            self.a / g1 * rho.powf(self.gamma)
        } else {
            // ρ (ρ^{γ−1} − ρ̄^{γ−1}) written to stay accurate near ρ̄.
            self.a / g1
                * rho
                * self.rho_bar.powf(g1)
                * (g1 * (rho / self.rho_bar).ln()).exp_m1()
        }
    }

    #[inline]
    pub(crate) fn dh(&self, rho: f64) -> f64 {
        let g1 = self.gamma - 1.0;
        self.a / g1 * (self.gamma * rho.powf(g1) - self.rho_bar.powf(g1))
    }

    /// Cancellation-free Bregman gap `a/(γ−1) r^γ φ((ρ − r)/r)` with
    /// `φ(d) = (1 + d)^γ − 1 − γd`.
    #[inline]
    pub(crate) fn bregman_raw(&self, rho: f64, r: f64) -> f64 {
        let d = (rho - r) / r;
        self.a / (self.gamma - 1.0) * r.powf(self.gamma) * bregman_kernel(self.gamma, d)
    }
}

impl Isentropic {
    /// Bregman gap against `r`, falling back to `H(ρ)` itself for the vacuum
    /// reference `r = ρ̄ = 0`, where `H′(0) = H(0) = 0`.
    #[inline]
    pub(crate) fn energy_gap(&self, rho: f64, r: f64) -> f64 {
        if r > 0.0 {
            self.bregman_raw(rho, r)
        } else {
            self.h(rho)
        }
    }
}

/// `(1 + d)^γ − 1 − γd`, by its binomial series near `d = 0`.
fn bregman_kernel(gamma: f64, d: f64) -> f64 {
    if d.abs() < 0.25 {
        let mut coeff = gamma * (gamma - 1.0) / 2.0;
        let mut pow = d * d;
        let mut acc = 0.0;
        let mut k = 2.0;
        for _ in 0..60 {
            let term = coeff * pow;
            acc += term;
            if term == 0.0 || term.abs() <= 1e-18 * acc.abs() {
                break;
            }
            coeff *= (gamma - k) / (k + 1.0);
            pow *= d;
            k += 1.0;
        }
        acc
    } else {
        (1.0 + d).powf(gamma) - 1.0 - gamma * d
    }
}

fn check_density(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("density must be >= 0, got {rho}")))
    }
}

impl PressureLaw for Isentropic {
    fn rho_bar(&self) -> f64 {
        self.rho_bar
    }

    fn pressure(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.p(rho))
    }

    fn dpressure(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.dp(rho))
    }

    fn potential(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.h(rho))
    }

    fn dpotential(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("H' needs rho > 0, got {rho}")));
        }
        Ok(self.dh(rho))
    }

    fn bregman(&self, rho: f64, r: f64) -> Result<f64> {
        check_bregman_args(rho, r)?;
        Ok(self.bregman_raw(rho, r))
    }
}

/// Lower-bound constant `c(r)` with
/// `bregman(ρ, r) ≥ c(r)(ρ − r)²` on `r/2 < ρ < 2r` and
/// `bregman(ρ, r) ≥ c(r)(1 + ρ^γ)` elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticBound {
    pub r: f64,
    /// Sampled infimum of `bregman/(ρ − r)²` on the near window.
    pub near_inf: f64,
    /// Sampled infimum of `bregman/(1 + ρ^γ)` away from it.
    pub far_inf: f64,
    /// `SAFETY · min(near_inf, far_inf)`.
    pub c: f64,
}

impl QuadraticBound {
    pub const SAFETY: f64 = 0.99;
    /// Densities are sampled on `(0, SPAN · r]`.
    pub const SPAN: f64 = 100.0;
    const SAMPLES: usize = 20_000;

    /// Whether `ρ` satisfies the bound.
    pub fn holds_at(&self, law: &Isentropic, rho: f64) -> bool {
        let b = law.bregman_raw(rho, self.r);
        if rho > 0.5 * self.r && rho < 2.0 * self.r {
            b >= self.c * (rho - self.r).powi(2)
        } else {
            b >= self.c * (1.0 + rho.powf(law.gamma))
        }
    }
}

/// Computes `c(r)` by dense sampling of `ρ ∈ (0, 100 r]`.
pub fn quadratic_bound_constant(r: f64, law: &Isentropic) -> Result<QuadraticBound> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("c(r) needs r > 0, got {r}")));
    }
    let mut near_inf = f64::INFINITY;
    let mut far_inf = f64::INFINITY;
    let mut visit = |rho: f64| {
        let b = law.bregman_raw(rho, r);
        if rho > 0.5 * r && rho < 2.0 * r {
            let d = rho - r;
            if d != 0.0 {
                near_inf = near_inf.min(b / (d * d));
            }
        } else {
            far_inf = far_inf.min(b / (1.0 + rho.powf(law.gamma)));
        }
    };
    // Uniform in (0, 2.5 r] to resolve the window, geometric beyond.
    let n = QuadraticBound::SAMPLES;
    for k in 0..=n {
        visit(2.5 * r * k as f64 / n as f64);
    }
    for k in 0..=n {
        let t = k as f64 / n as f64;
        visit(2.5 * r * (QuadraticBound::SPAN / 2.5).powf(t));
    }
    // Window edges and the minimiser's neighbourhood are sampled explicitly.
    for rho in [0.5 * r, 2.0 * r, r * (1.0 + 1e-6), r * (1.0 - 1e-6)] {
        visit(rho);
    }
    let c = QuadraticBound::SAFETY * near_inf.min(far_inf);
    Ok(QuadraticBound {
        r,
        near_inf,
        far_inf,
        c,
    })
}
