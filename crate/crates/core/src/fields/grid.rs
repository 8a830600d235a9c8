use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary treatment on one side of the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// `u = 0` on the wall.
    NoSlip,
    /// `u·n = 0` with tangential friction `(S n)_tan + β u_tan = 0`.
    NavierSlip,
    Periodic,
}

impl BoundaryKind {
    pub fn code(self) -> u8 {
        match self {
            BoundaryKind::NoSlip => 0,
            BoundaryKind::NavierSlip => 1,
            BoundaryKind::Periodic => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(BoundaryKind::NoSlip),
            1 => Some(BoundaryKind::NavierSlip),
            2 => Some(BoundaryKind::Periodic),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Lower, Side::Upper];

    pub fn index(self) -> usize {
        match self {
            Side::Lower => 0,
            Side::Upper => 1,
        }
    }

    /// Sign of the outward normal along the axis.
    pub fn normal_sign(self) -> f64 {
        match self {
            Side::Lower => -1.0,
            Side::Upper => 1.0,
        }
    }
}

/// Structured rectangular mesh with cell-centred storage, in one or two
/// dimensions.
///
/// Cell `(i, j)` has linear index `j * nx + i` and centre
/// `origin + (i + ½, j + ½) · spacing`. In 1D the second axis has one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    cells: [usize; 2],
    spacing: [f64; 2],
    origin: [f64; 2],
    boundary: [[BoundaryKind; 2]; 2],
}

pub const MIN_CELLS: usize = 4;

impl Grid {
    pub fn new(
        dim: usize,
        cells: &[usize],
        spacing: &[f64],
        origin: &[f64],
        boundary: &[[BoundaryKind; 2]],
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Structural(format!("grid dimension {dim} not in {{1, 2}}")));
        }
        if cells.len() != dim || spacing.len() != dim || origin.len() != dim || boundary.len() != dim
        {
            return Err(Error::Structural(format!(
                "grid of dimension {dim} needs {dim} entries per axis"
            )));
        }
        let mut g = Grid {
            dim,
            cells: [1, 1],
            spacing: [1.0, 1.0],
            origin: [0.0, 0.0],
            boundary: [[BoundaryKind::Periodic; 2]; 2],
        };
        for a in 0..dim {
            if cells[a] < MIN_CELLS {
                return Err(Error::Domain(format!(
                    "axis {a} has {} cells, need at least {MIN_CELLS}",
                    cells[a]
                )));
            }
            if !(spacing[a] > 0.0 && spacing[a].is_finite()) {
                return Err(Error::Domain(format!("axis {a} spacing {} not positive", spacing[a])));
            }
            if !origin[a].is_finite() {
                return Err(Error::Domain(format!("axis {a} origin not finite")));
            }
            let [lo, hi] = boundary[a];
            if (lo == BoundaryKind::Periodic) != (hi == BoundaryKind::Periodic) {
                return Err(Error::Structural(format!(
                    "axis {a}: periodic sides must come in opposing pairs"
                )));
            }
            g.cells[a] = cells[a];
            g.spacing[a] = spacing[a];
            g.origin[a] = origin[a];
            g.boundary[a] = boundary[a];
        }
        Ok(g)
    }

    /// Interval `[0, length]` split into `n` cells.
    pub fn line(n: usize, length: f64, kind: BoundaryKind) -> Result<Self> {
        Self::new(1, &[n], &[length / n as f64], &[0.0], &[[kind, kind]])
    }

    /// Square `[0, length]²` with `n × n` cells and the same kind on every side.
    pub fn square(n: usize, length: f64, kind: BoundaryKind) -> Result<Self> {
        let h = length / n as f64;
        Self::new(2, &[n, n], &[h, h], &[0.0, 0.0], &[[kind, kind], [kind, kind]])
    }

    /// Same extents and boundaries with `n` cells along every axis.
    pub fn with_resolution(&self, n: usize) -> Result<Self> {
        let mut cells = [0usize; 2];
        let mut spacing = [0.0; 2];
        for a in 0..self.dim {
            cells[a] = n;
            spacing[a] = self.extent(a) / n as f64;
        }
        Self::new(
            self.dim,
            &cells[..self.dim],
            &spacing[..self.dim],
            &self.origin[..self.dim],
            &self.boundary[..self.dim],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self, axis: usize) -> usize {
        self.cells[axis]
    }

    pub fn nx(&self) -> usize {
        self.cells[0]
    }

    pub fn ny(&self) -> usize {
        self.cells[1]
    }

    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing[..self.dim].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn origin(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    pub fn extent(&self, axis: usize) -> f64 {
        self.cells[axis] as f64 * self.spacing[axis]
    }

    pub fn boundary(&self, axis: usize, side: Side) -> BoundaryKind {
        self.boundary[axis][side.index()]
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.boundary[axis][0] == BoundaryKind::Periodic
    }

    /// Whether any side uses `kind`.
    pub fn has_boundary(&self, kind: BoundaryKind) -> bool {
        (0..self.dim).any(|a| self.boundary[a].contains(&kind))
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing[..self.dim].iter().product()
    }

    /// `|Ω|`.
    pub fn measure(&self) -> f64 {
        (0..self.dim).map(|a| self.extent(a)).product()
    }

    /// Area of one boundary face normal to `axis` (1 in 1D).
    pub fn face_area(&self, axis: usize) -> f64 {
        if self.dim == 1 {
            1.0
        } else {
            self.spacing[1 - axis]
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.cells[0] + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.cells[0], idx / self.cells[0])
    }

    /// Cell centre; the second coordinate is 0 in 1D.
    #[inline]
    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        let x = self.origin[0] + (i as f64 + 0.5) * self.spacing[0];
        let y = if self.dim == 2 {
            self.origin[1] + (j as f64 + 0.5) * self.spacing[1]
        } else {
            0.0
        };
        [x, y]
    }

    #[inline]
    pub fn center_of(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.coords(idx);
        self.center(i, j)
    }

    /// Coordinate of the wall on `side` of `axis`.
    pub fn wall(&self, axis: usize, side: Side) -> f64 {
        match side {
            Side::Lower => self.origin[axis],
            Side::Upper => self.origin[axis] + self.extent(axis),
        }
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Structural("fields live on different grids".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_unpaired_grids() {
        assert!(Grid::line(3, 1.0, BoundaryKind::NoSlip).is_err());
        let bad = Grid::new(
            1,
            &[8],
            &[0.1],
            &[0.0],
            &[[BoundaryKind::Periodic, BoundaryKind::NoSlip]],
        );
        assert!(matches!(bad, Err(Error::Structural(_))));
        assert!(Grid::new(1, &[8], &[0.0], &[0.0], &[[BoundaryKind::NoSlip; 2]]).is_err());
    }

    #[test]
    fn geometry() {
        let g = Grid::square(8, 1.0, BoundaryKind::Periodic).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.cell_volume(), 1.0 / 64.0);
        assert_eq!(g.center(0, 7), [0.0625, 0.9375]);
        assert_eq!(g.coords(g.index(3, 5)), (3, 5));
        let f = g.with_resolution(16).unwrap();
        assert_eq!(f.spacing(1), 1.0 / 16.0);
        assert_eq!(f.measure(), 1.0);
    }
}
