use crate::error::{Error, Result};

use super::grid::Grid;

fn check_values(grid: &Grid, values: &[f64], what: &str) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::Structural(format!(
            "{what} has {} values for {} cells",
            values.len(),
            grid.len()
        )));
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("{what} has a non-finite value at cell {k}")));
    }
    Ok(())
}

/// Cell-centred scalar field.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        check_values(&grid, &values, "scalar field")?;
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self::from_raw(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f` at cell centres.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(grid.center_of(k))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Cell-centred vector field with `grid.dim()` components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid,
    comps: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn new(grid: Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(Error::Structural(format!(
                "vector field has {} components on a {}D grid",
                comps.len(),
                grid.dim()
            )));
        }
        for c in &comps {
            check_values(&grid, c, "vector field")?;
        }
        Ok(Self { grid, comps })
    }

    pub(crate) fn from_raw(grid: Grid, comps: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(comps.len(), grid.dim());
        Self { grid, comps }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::from_raw(grid, vec![vec![0.0; grid.len()]; grid.dim()])
    }

    /// Samples `f` at cell centres; only the first `dim` entries are used.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> [f64; 2]) -> Result<Self> {
        let mut comps = vec![Vec::with_capacity(grid.len()); grid.dim()];
        for k in 0..grid.len() {
            let v = f(grid.center_of(k));
            for (c, vc) in comps.iter_mut().zip(v) {
                c.push(vc);
            }
        }
        Self::new(grid, comps)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, k: usize) -> &[f64] {
        &self.comps[k]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 2] {
        let mut v = [0.0; 2];
        for (k, c) in self.comps.iter().enumerate() {
            v[k] = c[idx];
        }
        v
    }
}

/// Cell-centred rank-2 tensor; entry `(k, j)` is stored row-major, so for a
/// velocity gradient it holds `∂_j v_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    grid: Grid,
    comps: Vec<Vec<f64>>,
}

impl TensorField {
    pub fn new(grid: Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
        let d = grid.dim();
        if comps.len() != d * d {
            return Err(Error::Structural(format!(
                "tensor field has {} components on a {d}D grid",
                comps.len()
            )));
        }
        for c in &comps {
            check_values(&grid, c, "tensor field")?;
        }
        Ok(Self { grid, comps })
    }

    pub(crate) fn from_raw(grid: Grid, comps: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(comps.len(), grid.dim() * grid.dim());
        Self { grid, comps }
    }

    pub fn zeros(grid: Grid) -> Self {
        let d = grid.dim();
        Self::from_raw(grid, vec![vec![0.0; grid.len()]; d * d])
    }

    /// Samples a matrix-valued function at cell centres.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> [[f64; 2]; 2]) -> Result<Self> {
        let d = grid.dim();
        let mut comps = vec![Vec::with_capacity(grid.len()); d * d];
        for idx in 0..grid.len() {
            let m = f(grid.center_of(idx));
            for k in 0..d {
                for j in 0..d {
                    comps[k * d + j].push(m[k][j]);
                }
            }
        }
        Self::new(grid, comps)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn entry(&self, k: usize, j: usize) -> &[f64] {
        &self.comps[k * self.grid.dim() + j]
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [[f64; 2]; 2] {
        let d = self.grid.dim();
        let mut m = [[0.0; 2]; 2];
        for k in 0..d {
            for j in 0..d {
                m[k][j] = self.comps[k * d + j][idx];
            }
        }
        m
    }

    /// Pointwise difference `self − other`.
    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.grid.check_same(&other.grid)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self::from_raw(self.grid, comps))
    }
}
