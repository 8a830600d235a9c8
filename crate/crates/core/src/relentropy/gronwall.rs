//! The Gronwall weight `h(t)` of a strong solution and the envelope
//! `E0 · exp(∫h)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::Grid;
use crate::numerics::{compensated_sum, cumulative_trapezoid};
use crate::solver::{check_compatible, FluidParams};

use super::pair::{PairPoint, TestPair};

/// `h/K = ‖∇U‖_∞ + ‖div S(∇U)/r‖²_{L³} + max(‖div S(∇U)‖_{L³}, ‖div S(∇U)‖_{L^q})² + 1`
/// from cell samples, with `‖∇U‖_∞` the max-row-sum matrix norm and
/// `q = 6γ/(5γ − 6)`.
pub(crate) fn gronwall_weight(cells: &[PairPoint], grid: &Grid, params: &FluidParams) -> Result<f64> {
    let d = grid.dim();
    let dv = grid.cell_volume();
    let q = params.law.gronwall_q();
    let mut grad_inf = 0.0_f64;
    let mut ds = Vec::with_capacity(cells.len());
    for (idx, p) in cells.iter().enumerate() {
        if !(p.r > 0.0) {
            return Err(Error::Admissibility(format!(
                "strong density r = {} at cell {idx} is not bounded away from zero",
                p.r
            )));
        }
        for row in p.grad_u.iter().take(d) {
            grad_inf = grad_inf.max(row.iter().take(d).map(|v| v.abs()).sum());
        }
        let v = p.div_stress(&params.viscosity, d);
        ds.push(((v[0] * v[0] + v[1] * v[1]).sqrt(), p.r));
    }
    let norm = |p: f64, scaled: bool| -> f64 {
        compensated_sum(ds.iter().map(|&(m, r)| {
            let m = if scaled { m / r } else { m };
            m.powf(p) * dv
        }))
        .powf(1.0 / p)
    };
    let scaled = norm(3.0, true);
    let mixed = norm(3.0, false).max(norm(q, false));
    Ok(grad_inf + scaled * scaled + mixed * mixed + 1.0)
}

/// `h(t)` on `grid` at each of `times`, scaled by the calibration constant `k`.
pub fn gronwall_h(
    pair: &dyn TestPair,
    grid: &Grid,
    params: &FluidParams,
    k: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    check_compatible(pair, grid)?;
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("Gronwall constant K = {k} must be >= 0")));
    }
    times
        .iter()
        .map(|&t| {
            let cells: Vec<PairPoint> = (0..grid.len())
                .into_par_iter()
                .map(|idx| pair.point(t, grid.center_of(idx)))
                .collect();
            Ok(k * gronwall_weight(&cells, grid, params)?)
        })
        .collect()
}

/// `E0 · exp(∫_0^τ h)` with the integral by the trapezoid rule on `times`.
pub fn gronwall_envelope(e0: f64, times: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    if times.len() != h.len() {
        return Err(Error::Structural(format!(
            "{} times but {} weights",
            times.len(),
            h.len()
        )));
    }
    if !(e0 >= 0.0) {
        return Err(Error::Domain(format!("initial relative entropy {e0} must be >= 0")));
    }
    if let Some(v) = h.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("Gronwall weight {v} must be >= 0")));
    }
    Ok(cumulative_trapezoid(times, h)
        .into_iter()
        .map(|i| e0 * i.exp())
        .collect())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;
    use crate::fields::{BoundaryKind, ViscosityParams};
    use crate::relentropy::jet::Jet;
    use crate::relentropy::pair::{Compatibility, ConstantPair, PairJets, PeriodicVortex};
    use crate::thermo::Isentropic;

    fn params() -> FluidParams {
        FluidParams::new(
            ViscosityParams::new(0.1, 0.05, 0.0).unwrap(),
            Isentropic::new(1.0, 2.0, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_weight_is_k() {
        let g = Grid::square(8, 1.0, BoundaryKind::Periodic).unwrap();
        let h = gronwall_h(&ConstantPair::rest(2, 1.0), &g, &params(), 2.5, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(h, vec![2.5; 3]);
    }

    /// Steady `U = G x`, `r = 1`.
    #[derive(Debug)]
    struct Linear([[f64; 2]; 2]);

    impl TestPair for Linear {
        fn name(&self) -> String {
            "linear".into()
        }
        fn dim(&self) -> usize {
            2
        }
        fn compatibility(&self) -> Compatibility {
            Compatibility::Unconstrained
        }
        fn jets(&self, _t: f64, x: [f64; 2]) -> PairJets {
            let (x, y) = (Jet::var(1, x[0]), Jet::var(2, x[1]));
            let g = self.0;
            PairJets {
                r: Jet::constant(1.0),
                u: [x * g[0][0] + y * g[0][1], x * g[1][0] + y * g[1][1]],
            }
        }
    }

    #[test]
    fn linear_field_weight_is_induced_norm_plus_one() {
        let g = Grid::square(8, 1.0, BoundaryKind::Periodic).unwrap();
        let grad = [[0.5, -2.0], [1.0, 0.25]];
        // Row sums 2.5 and 1.25.
        let h = gronwall_h(&Linear(grad), &g, &params(), 1.0, &[0.0]).unwrap();
        assert_eq!(h, vec![3.5]);
    }

    #[test]
    fn periodic_pair_weight_is_periodic_and_finite() {
        let g = Grid::square(16, 1.0, BoundaryKind::Periodic).unwrap();
        let pair = PeriodicVortex {
            r0: 1.0,
            amplitude: 0.2,
            swirl: 0.5,
            omega: 2.0 * PI,
        };
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
        let h = gronwall_h(&pair, &g, &params(), 1.0, &times).unwrap();
        assert!(h.iter().all(|v| v.is_finite() && *v >= 1.0));
        for k in 0..10 {
            assert!((h[k] - h[k + 10]).abs() < 1e-10 * h[k]);
        }
    }

    #[test]
    fn envelope_closed_forms() {
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
        let zero = gronwall_envelope(0.0, &times, &vec![3.0; 11]).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
        let env = gronwall_envelope(1.0, &times, &vec![0.7; 11]).unwrap();
        for (t, e) in times.iter().zip(&env) {
            assert!((e - (0.7 * t).exp()).abs() < 1e-14 * e);
        }
        assert!(gronwall_envelope(1.0, &times, &[-1.0; 11]).is_err());
    }

    #[test]
    fn piecewise_constant_weight_is_resolution_independent() {
        // h = 1 on [0, ½), 3 on [½, 1]: the trapezoid rule is exact on every
        // grid containing the jump as a pair of coincident-in-value nodes.
        let build = |n: usize| {
            let mut times = Vec::new();
            let mut h = Vec::new();
            for k in 0..=n {
                let t = 0.5 * k as f64 / n as f64;
                times.push(t);
                h.push(1.0);
            }
            for k in 0..=n {
                let t = 0.5 + 0.5 * k as f64 / n as f64;
                times.push(t + if k == 0 { 1e-15 } else { 0.0 });
                h.push(3.0);
            }
            let env = gronwall_envelope(2.0, &times, &h).unwrap();
            *env.last().unwrap()
        };
        let coarse = build(10);
        let fine = build(1000);
        let exact = 2.0 * (0.5_f64 + 1.5).exp();
        assert!((coarse - fine).abs() < 1e-10 * exact);
        assert!((fine - exact).abs() < 1e-10 * exact);
    }

    proptest! {
        #[test]
        fn envelope_is_monotone(e0 in 0.0..10.0_f64, de in 0.0..1.0_f64, bump in 0.0..2.0_f64, at in 0usize..11) {
            let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.05).collect();
            let h: Vec<f64> = (0..=10).map(|k| 1.0 + (k as f64).sin().abs()).collect();
            let mut h2 = h.clone();
            h2[at] += bump;
            let a = gronwall_envelope(e0, &times, &h).unwrap();
            let b = gronwall_envelope(e0 + de, &times, &h).unwrap();
            let c = gronwall_envelope(e0, &times, &h2).unwrap();
            for k in 0..times.len() {
                prop_assert!(b[k] >= a[k]);
                prop_assert!(c[k] >= a[k]);
            }
        }
    }
}
