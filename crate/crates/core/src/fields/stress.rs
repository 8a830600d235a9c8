use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::compensated_sum;

use super::field::TensorField;

/// Shear viscosity `mu`, bulk viscosity `eta` and wall friction `beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscosityParams {
    pub mu: f64,
    pub eta: f64,
    pub beta: f64,
}

impl ViscosityParams {
    pub fn new(mu: f64, eta: f64, beta: f64) -> Result<Self> {
        let p = Self { mu, eta, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Domain(format!("shear viscosity mu = {} must be > 0", self.mu)));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::Domain(format!("bulk viscosity eta = {} must be >= 0", self.eta)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Domain(format!("friction beta = {} must be >= 0", self.beta)));
        }
        Ok(())
    }

    /// Viscous stress for a single velocity gradient `g[k][j] = ∂_j u_k`.
    ///
    /// `S = μ(∇u + ∇ᵗu − ⅔ div u I) + η div u I`. The ⅔ coefficient is kept
    /// in every dimension.
    #[inline]
    pub fn stress_at(&self, g: &[[f64; 2]; 2], dim: usize) -> [[f64; 2]; 2] {
        let mut div = 0.0;
        for (a, row) in g.iter().enumerate().take(dim) {
            div += row[a];
        }
        let mut s = [[0.0; 2]; 2];
        for k in 0..dim {
            for j in 0..dim {
                if k == j {
                    s[k][j] = self.mu * (g[k][j] + g[j][k] - 2.0 / 3.0 * div) + self.eta * div;
                } else {
                    s[k][j] = self.mu * (g[k][j] + g[j][k]);
                }
            }
        }
        s
    }

    /// Pointwise `S(g) : w`.
    #[inline]
    pub fn pairing_at(&self, g: &[[f64; 2]; 2], w: &[[f64; 2]; 2], dim: usize) -> f64 {
        let s = self.stress_at(g, dim);
        let mut acc = 0.0;
        for k in 0..dim {
            for j in 0..dim {
                acc += s[k][j] * w[k][j];
            }
        }
        acc
    }
}

/// `S(∇u)` cell by cell.
pub fn stress(grad_u: &TensorField, visc: &ViscosityParams) -> TensorField {
    let g = *grad_u.grid();
    let d = g.dim();
    let mut comps = vec![Vec::with_capacity(g.len()); d * d];
    for idx in 0..g.len() {
        let s = visc.stress_at(&grad_u.at(idx), d);
        for k in 0..d {
            for j in 0..d {
                comps[k * d + j].push(s[k][j]);
            }
        }
    }
    TensorField::from_raw(g, comps)
}

/// `∫ S(gv) : gw dx`, bilinear in its two tensor arguments.
pub fn dissipation_pairing(
    gv: &TensorField,
    gw: &TensorField,
    visc: &ViscosityParams,
) -> Result<f64> {
    gv.grid().check_same(gw.grid())?;
    let g = gv.grid();
    let d = g.dim();
    let dv = g.cell_volume();
    Ok(compensated_sum(
        (0..g.len()).map(|idx| visc.pairing_at(&gv.at(idx), &gw.at(idx), d) * dv),
    ))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::fields::{gradient, BoundaryKind, Grid, VectorField};

    fn visc(mu: f64, eta: f64) -> ViscosityParams {
        ViscosityParams::new(mu, eta, 0.0).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(ViscosityParams::new(0.0, 0.0, 0.0).is_err());
        assert!(ViscosityParams::new(1.0, -1.0, 0.0).is_err());
        assert!(ViscosityParams::new(1.0, 0.0, -0.1).is_err());
    }

    #[test]
    fn rigid_rotation_is_stress_free() {
        let g = Grid::square(16, 1.0, BoundaryKind::NoSlip).unwrap();
        let z = VectorField::from_fn(g, |x| [0.5 - 0.75 * x[1], -0.25 + 0.75 * x[0]]).unwrap();
        let s = stress(&gradient(&z).unwrap(), &visc(1.3, 0.7));
        for k in 0..2 {
            for j in 0..2 {
                assert!(s.entry(k, j).iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn one_dimensional_unit_strain() {
        // S = μ(2 − ⅔)·1 = 4/3 for μ = 1, η = 0, written out independently.
        let expected = 1.0 * (1.0 + 1.0) - 1.0 * (2.0 / 3.0) * 1.0;
        let g = Grid::line(8, 1.0, BoundaryKind::NoSlip).unwrap();
        let u = VectorField::from_fn(g, |x| [x[0], 0.0]).unwrap();
        let s = stress(&gradient(&u).unwrap(), &visc(1.0, 0.0));
        for v in s.entry(0, 0) {
            assert!((v - expected).abs() < 1e-13);
            assert!((v - 4.0 / 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn pure_strain_in_2d() {
        for eta in [0.0, 0.3, 5.0] {
            let s = visc(1.0, eta).stress_at(&[[1.0, 0.0], [0.0, -1.0]], 2);
            assert_eq!(s, [[2.0, 0.0], [0.0, -2.0]]);
        }
    }

    #[test]
    fn pairing_with_zero_and_rigid_fields_vanishes() {
        let g = Grid::square(8, 1.0, BoundaryKind::Periodic).unwrap();
        let z = VectorField::from_fn(g, |x| [x[0] * x[1], x[0] - x[1] * x[1]]).unwrap();
        let gz = gradient(&z).unwrap();
        let zero = TensorField::zeros(g);
        assert_eq!(dissipation_pairing(&gz, &zero, &visc(1.0, 1.0)).unwrap(), 0.0);
        let g2 = Grid::square(8, 1.0, BoundaryKind::NoSlip).unwrap();
        let rot = VectorField::from_fn(g2, |x| [-x[1], x[0]]).unwrap();
        let gr = gradient(&rot).unwrap();
        assert_eq!(dissipation_pairing(&gr, &gr, &visc(1.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn grid_mismatch_is_structural() {
        let a = TensorField::zeros(Grid::square(8, 1.0, BoundaryKind::Periodic).unwrap());
        let b = TensorField::zeros(Grid::square(16, 1.0, BoundaryKind::Periodic).unwrap());
        assert!(matches!(
            dissipation_pairing(&a, &b, &visc(1.0, 0.0)),
            Err(Error::Structural(_))
        ));
    }

    fn arb_matrix() -> impl Strategy<Value = [[f64; 2]; 2]> {
        prop::array::uniform2(prop::array::uniform2(-10.0..10.0f64))
    }

    proptest! {
        #[test]
        fn stress_is_symmetric_and_linear(
            a in arb_matrix(), b in arb_matrix(), c in -3.0..3.0f64,
            mu in 0.01..5.0f64, eta in 0.0..5.0f64,
        ) {
            let v = visc(mu, eta);
            let s = v.stress_at(&a, 2);
            prop_assert_eq!(s[0][1], s[1][0]);
            let mut comb = [[0.0; 2]; 2];
            for k in 0..2 { for j in 0..2 { comb[k][j] = a[k][j] + c * b[k][j]; } }
            let lhs = v.stress_at(&comb, 2);
            let sb = v.stress_at(&b, 2);
            for k in 0..2 { for j in 0..2 {
                let rhs = s[k][j] + c * sb[k][j];
                prop_assert!((lhs[k][j] - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
            }}
        }

        #[test]
        fn self_pairing_is_nonnegative(a in arb_matrix(), mu in 0.01..5.0f64, eta in 0.0..5.0f64) {
            let v = visc(mu, eta);
            prop_assert!(v.pairing_at(&a, &a, 2) >= -1e-12);
            // Strictly positive unless the symmetric part vanishes.
            let sym = (a[0][1] + a[1][0]).abs() + a[0][0].abs() + a[1][1].abs();
            if sym > 1e-3 {
                prop_assert!(v.pairing_at(&a, &a, 2) > 0.0);
            }
        }
    }

    #[test]
    fn self_pairing_of_a_random_field_is_positive() {
        use rand::{Rng, SeedableRng};
        let g = Grid::square(16, 1.0, BoundaryKind::NoSlip).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let comps = (0..2)
            .map(|_| (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let z = VectorField::new(g, comps).unwrap();
        let gz = gradient(&z).unwrap();
        assert!(dissipation_pairing(&gz, &gz, &visc(0.5, 0.1)).unwrap() > 0.0);
    }
}
