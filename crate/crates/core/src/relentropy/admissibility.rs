//! Sampled admissibility checks for comparison pairs.

use rayon::prelude::*;
use serde::Serialize;

use crate::fields::{BoundaryKind, Grid, Side};
use crate::solver::check_compatible;
use crate::thermo::Isentropic;

use super::pair::{PairPoint, TestPair};

/// Densities at or below this count as touching vacuum.
pub const R_FLOOR: f64 = 1e-8;
/// Wall traces are zero up to this multiple of `max(1, max|U|)`.
pub const TRACE_TOL: f64 = 1e-10;
const TIME_SAMPLES: usize = 9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub pair: String,
    pub r_min: f64,
    pub checks: Vec<AdmissibilityCheck>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AdmissibilityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `Ok` when every check passed, otherwise an admissibility error listing
    /// the failures.
    pub fn into_result(self) -> crate::Result<Self> {
        if self.passed() {
            return Ok(self);
        }
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        Err(crate::Error::Admissibility(format!(
            "pair `{}` fails: {}",
            self.pair,
            failed.join("; ")
        )))
    }
}

/// Sample coordinates along one axis: cell centres, faces and both walls.
fn lattice(grid: &Grid, axis: usize) -> Vec<f64> {
    if axis >= grid.dim() {
        return vec![0.0];
    }
    let n = 2 * grid.cells(axis);
    let h = 0.5 * grid.spacing(axis);
    (0..=n).map(|k| grid.origin(axis) + k as f64 * h).collect()
}

fn point_is_finite(p: &PairPoint) -> bool {
    let scalars = [p.r, p.dt_r];
    scalars
        .iter()
        .chain(&p.grad_r)
        .chain(&p.u)
        .chain(&p.dt_u)
        .chain(p.grad_u.iter().flatten())
        .chain(&p.lap_u)
        .chain(&p.grad_div_u)
        .all(|v| v.is_finite())
}

/// Checks, on a space-time lattice over `[t0, t1]`, that `r` stays away from
/// vacuum, that the pair's derivatives and the potential derivatives are
/// finite, and that `U` satisfies the grid's wall conditions.
pub fn validate_test_pair(pair: &dyn TestPair, grid: &Grid, law: &Isentropic, span: [f64; 2]) -> AdmissibilityReport {
    let mut checks = Vec::new();
    let dim_ok = pair.dim() == grid.dim();
    checks.push(AdmissibilityCheck {
        name: "dimension",
        passed: dim_ok,
        detail: format!("pair {}D, grid {}D", pair.dim(), grid.dim()),
    });
    let declared = check_compatible(pair, grid);
    checks.push(AdmissibilityCheck {
        name: "declared_compatibility",
        passed: declared.is_ok(),
        detail: match declared {
            Ok(()) => format!("{:?}", pair.compatibility()),
            Err(e) => e.to_string(),
        },
    });
    if !dim_ok {
        return AdmissibilityReport {
            pair: pair.name(),
            r_min: f64::NAN,
            checks,
        };
    }

    let times: Vec<f64> = if span[1] > span[0] {
        (0..TIME_SAMPLES)
            .map(|k| span[0] + (span[1] - span[0]) * k as f64 / (TIME_SAMPLES - 1) as f64)
            .collect()
    } else {
        vec![span[0]]
    };
    let xs = lattice(grid, 0);
    let ys = lattice(grid, 1);
    let d = grid.dim();

    // Interior and wall samples in one sweep.
    struct Acc {
        r_min: f64,
        finite: bool,
        u_max: f64,
        trace: f64,
    }
    let wall_kind = |axis: usize, c: f64| -> Option<BoundaryKind> {
        for side in Side::BOTH {
            if (c - grid.wall(axis, side)).abs() < 1e-12 * grid.extent(axis).max(1.0) {
                let kind = grid.boundary(axis, side);
                return (kind != BoundaryKind::Periodic).then_some(kind);
            }
        }
        None
    };
    let acc = times
        .par_iter()
        .map(|&t| {
            let mut a = Acc {
                r_min: f64::INFINITY,
                finite: true,
                u_max: 0.0,
                trace: 0.0,
            };
            for &y in &ys {
                for &x in &xs {
                    let p = pair.point(t, [x, y]);
                    a.r_min = a.r_min.min(p.r);
                    let h2 = if p.r > 0.0 { law.dp(p.r) / p.r } else { f64::NAN };
                    let potential_ok = (h2 * p.dt_r).is_finite() && (h2 * p.grad_r[0]).is_finite() && (h2 * p.grad_r[1]).is_finite();
                    a.finite &= point_is_finite(&p) && potential_ok;
                    let speed = (p.u[0] * p.u[0] + p.u[1] * p.u[1]).sqrt();
                    a.u_max = a.u_max.max(speed);
                    for (axis, c) in [x, y].into_iter().enumerate().take(d) {
                        match wall_kind(axis, c) {
                            Some(BoundaryKind::NoSlip) => a.trace = a.trace.max(speed),
                            Some(BoundaryKind::NavierSlip) => a.trace = a.trace.max(p.u[axis].abs()),
                            _ => {}
                        }
                    }
                }
            }
            a
        })
        .reduce(
            || Acc {
                r_min: f64::INFINITY,
                finite: true,
                u_max: 0.0,
                trace: 0.0,
            },
            |a, b| Acc {
                r_min: a.r_min.min(b.r_min),
                finite: a.finite && b.finite,
                u_max: a.u_max.max(b.u_max),
                trace: a.trace.max(b.trace),
            },
        );

    checks.push(AdmissibilityCheck {
        name: "lower_bound",
        passed: acc.r_min > R_FLOOR,
        detail: format!("min r = {:e}", acc.r_min),
    });
    checks.push(AdmissibilityCheck {
        name: "finite_norms",
        passed: acc.finite,
        detail: if acc.finite {
            format!("max |U| = {:e}", acc.u_max)
        } else {
            "non-finite pair or potential derivative".into()
        },
    });
    let tol = TRACE_TOL * acc.u_max.max(1.0);
    checks.push(AdmissibilityCheck {
        name: "boundary_trace",
        passed: acc.trace <= tol,
        detail: format!("max wall trace {:e} (tolerance {tol:e})", acc.trace),
    });
    AdmissibilityReport {
        pair: pair.name(),
        r_min: acc.r_min,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relentropy::{ConstantPair, DensityWave, SlipCell, WallBump};

    fn law() -> Isentropic {
        Isentropic::new(1.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn equilibrium_passes_everywhere() {
        for kind in [BoundaryKind::NoSlip, BoundaryKind::NavierSlip, BoundaryKind::Periodic] {
            let g = Grid::square(8, 1.0, kind).unwrap();
            let rep = validate_test_pair(&ConstantPair::rest(2, 1.0), &g, &law(), [0.0, 1.0]);
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn vanishing_density_fails_lower_bound() {
        let g = Grid::line(8, 1.0, BoundaryKind::Periodic).unwrap();
        let pair = DensityWave {
            dim: 1,
            amplitude: 1.0,
        };
        let rep = validate_test_pair(&pair, &g, &law(), [0.0, 0.0]);
        assert!(!rep.check("lower_bound").unwrap().passed);
        assert!(rep.check("boundary_trace").unwrap().passed);
        assert!(matches!(rep.into_result(), Err(crate::Error::Admissibility(_))));
    }

    #[test]
    fn wall_bump_traces() {
        let pair = WallBump { speed: 1.0 };
        for kind in [BoundaryKind::NoSlip, BoundaryKind::NavierSlip] {
            let g = Grid::square(16, 1.0, kind).unwrap();
            let rep = validate_test_pair(&pair, &g, &law(), [0.0, 1.0]);
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn slip_cell_fails_no_slip_trace() {
        let pair = SlipCell {
            amplitude: 0.1,
            speed: 0.3,
            omega: 1.0,
        };
        let ns = Grid::square(16, 1.0, BoundaryKind::NoSlip).unwrap();
        let rep = validate_test_pair(&pair, &ns, &law(), [0.0, 1.0]);
        assert!(!rep.check("boundary_trace").unwrap().passed);
        assert!(!rep.check("declared_compatibility").unwrap().passed);
        let slip = Grid::square(16, 1.0, BoundaryKind::NavierSlip).unwrap();
        assert!(validate_test_pair(&pair, &slip, &law(), [0.0, 1.0]).passed());
    }
}
