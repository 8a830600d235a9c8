//! Finite-difference operators on cell-centred fields.
//!
//! Interior cells use second-order central differences. Periodic axes wrap
//! around; on every other axis the first and last cells use the second-order
//! one-sided stencils, so affine fields are differentiated exactly all the way
//! to the wall. Boundary conditions enter only through the solver's ghost
//! cells, never here.

use crate::error::{Error, Result};

use super::field::{ScalarField, TensorField, VectorField};
use super::grid::Grid;

/// `∂f/∂x_axis` at every cell.
pub fn diff_axis(grid: &Grid, values: &[f64], axis: usize) -> Vec<f64> {
    let nx = grid.nx();
    let (n, stride, lines, line_stride) = if axis == 0 {
        (nx, 1, grid.ny(), nx)
    } else {
        (grid.ny(), nx, nx, 1)
    };
    let h = grid.spacing(axis);
    let inv2h = 1.0 / (2.0 * h);
    let periodic = grid.is_periodic(axis);
    let mut out = vec![0.0; values.len()];
    for line in 0..lines {
        let base = line * line_stride;
        let at = |i: usize| values[base + i * stride];
        for i in 1..n - 1 {
            out[base + i * stride] = (at(i + 1) - at(i - 1)) * inv2h;
        }
        if periodic {
            out[base] = (at(1) - at(n - 1)) * inv2h;
            out[base + (n - 1) * stride] = (at(0) - at(n - 2)) * inv2h;
        } else {
            out[base] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
            out[base + (n - 1) * stride] =
                (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv2h;
        }
    }
    out
}

pub fn scalar_gradient(f: &ScalarField) -> VectorField {
    let g = *f.grid();
    let comps = (0..g.dim()).map(|a| diff_axis(&g, f.values(), a)).collect();
    VectorField::from_raw(g, comps)
}

/// `∇v` with entry `(k, j) = ∂_j v_k`.
pub fn gradient(v: &VectorField) -> Result<TensorField> {
    let g = *v.grid();
    if v.dim() != g.dim() {
        return Err(Error::Structural(format!(
            "{}-component field on a {}D grid",
            v.dim(),
            g.dim()
        )));
    }
    let d = g.dim();
    let mut comps = Vec::with_capacity(d * d);
    for k in 0..d {
        for j in 0..d {
            comps.push(diff_axis(&g, v.component(k), j));
        }
    }
    Ok(TensorField::from_raw(g, comps))
}

/// `div v`, the trace of [`gradient`].
pub fn divergence(v: &VectorField) -> Result<ScalarField> {
    let g = *v.grid();
    if v.dim() != g.dim() {
        return Err(Error::Structural(format!(
            "{}-component field on a {}D grid",
            v.dim(),
            g.dim()
        )));
    }
    let mut out = diff_axis(&g, v.component(0), 0);
    for k in 1..g.dim() {
        for (o, d) in out.iter_mut().zip(diff_axis(&g, v.component(k), k)) {
            *o += d;
        }
    }
    Ok(ScalarField::from_raw(g, out))
}
