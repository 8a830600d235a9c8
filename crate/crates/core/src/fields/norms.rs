use crate::error::{Error, Result};
use crate::numerics::compensated_sum;

use super::field::{ScalarField, TensorField, VectorField};
use super::grid::Grid;

/// Anything with a pointwise magnitude: `|f|`, `|v|` (Euclidean) or `|T|`
/// (Frobenius).
pub trait Pointwise {
    fn grid(&self) -> &Grid;
    fn magnitude(&self, idx: usize) -> f64;
}

impl Pointwise for ScalarField {
    fn grid(&self) -> &Grid {
        ScalarField::grid(self)
    }

    fn magnitude(&self, idx: usize) -> f64 {
        self.values()[idx].abs()
    }
}

impl Pointwise for VectorField {
    fn grid(&self) -> &Grid {
        VectorField::grid(self)
    }

    fn magnitude(&self, idx: usize) -> f64 {
        let v = self.at(idx);
        (v[0] * v[0] + v[1] * v[1]).sqrt()
    }
}

impl Pointwise for TensorField {
    fn grid(&self) -> &Grid {
        TensorField::grid(self)
    }

    fn magnitude(&self, idx: usize) -> f64 {
        let m = self.at(idx);
        m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Cell-volume-weighted discrete `Lᵖ` norm; `p = ∞` gives the max norm.
pub fn lp_norm<F: Pointwise + ?Sized>(f: &F, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("Lp norm needs p >= 1, got {p}")));
    }
    let g = f.grid();
    if p.is_infinite() {
        return Ok((0..g.len()).map(|k| f.magnitude(k)).fold(0.0, f64::max));
    }
    let dv = g.cell_volume();
    let s = compensated_sum((0..g.len()).map(|k| f.magnitude(k).powf(p) * dv));
    Ok(if p == 2.0 { s.sqrt() } else { s.powf(1.0 / p) })
}

/// `‖f‖²_{L²}` without the square root.
pub fn l2_norm_sq<F: Pointwise + ?Sized>(f: &F) -> f64 {
    let g = f.grid();
    let dv = g.cell_volume();
    compensated_sum((0..g.len()).map(|k| {
        let m = f.magnitude(k);
        m * m * dv
    }))
}
