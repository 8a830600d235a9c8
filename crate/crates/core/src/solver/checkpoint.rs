//! Binary checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! offset  size  field
//! 0       8     magic "NSRECKP1"
//! 8       4     u32 format version (1)
//! 12      4     u32 dim
//! 16      4     u32 nx
//! 20      4     u32 ny
//! 24      8     f64 dx
//! 32      8     f64 dy
//! 40      8     f64 x0
//! 48      8     f64 y0
//! 56      4     u8 boundary codes: x-lower, x-upper, y-lower, y-upper
//!               (0 no-slip, 1 Navier slip, 2 periodic)
//! 60      8     f64 time
//! 68      8     f64 mu
//! 76      8     f64 eta
//! 84      8     f64 beta
//! 92      8     f64 a
//! 100     8     f64 gamma
//! 108     8     f64 rho_bar
//! 116     8     u64 cell count n
//! 124     8n    rho, row-major (x fastest)
//! ...     8n    u_x
//! ...     8n    u_y (2D only)
//! ```
//!
//! A text sidecar `<file>.meta` records the config hash.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fields::{BoundaryKind, Grid, ScalarField, Side, VectorField, ViscosityParams};
use crate::thermo::Isentropic;

use super::{FluidParams, State};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"NSRECKP1";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 124;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub state: State,
    pub params: FluidParams,
    pub config_hash: Option<String>,
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

pub fn write_checkpoint(path: &Path, state: &State, params: &FluidParams, config_hash: &str) -> Result<()> {
    let g = state.grid();
    let d = g.dim();
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * g.len() * (1 + d));
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    for v in [VERSION, d as u32, g.nx() as u32, g.ny() as u32] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let dy = if d == 2 { g.spacing(1) } else { 0.0 };
    let y0 = if d == 2 { g.origin(1) } else { 0.0 };
    for v in [g.spacing(0), dy, g.origin(0), y0] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for axis in 0..2 {
        for side in Side::BOTH {
            let code = if axis < d {
                g.boundary(axis, side).code()
            } else {
                BoundaryKind::Periodic.code()
            };
            buf.push(code);
        }
    }
    let v = params.viscosity;
    let l = params.law;
    for x in [state.time, v.mu, v.eta, v.beta, l.a, l.gamma, l.rho_bar] {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf.extend_from_slice(&(g.len() as u64).to_le_bytes());
    debug_assert_eq!(buf.len(), HEADER_LEN);
    for x in state.rho.values().iter().chain(state.u.components().iter().flatten()) {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    fs::write(path, &buf).map_err(|e| Error::io(path, e))?;
    let meta = format!("format = NSRECKP1 v{VERSION}\nconfig_hash = {config_hash}\n");
    let side = sidecar(path);
    fs::write(&side, meta).map_err(|e| Error::io(side, e))
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let bytes = self.buf.get(self.pos..end).ok_or_else(|| Error::Format {
            path: self.path.into(),
            reason: format!("truncated at byte {}", self.pos),
        })?;
        self.pos = end;
        Ok(bytes.try_into().expect("slice has length N"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |reason: String| Error::Format {
        path: path.into(),
        reason,
    };
    let mut r = Reader {
        buf: &buf,
        pos: 0,
        path,
    };
    if &r.take::<8>()? != CHECKPOINT_MAGIC {
        return Err(bad("not a checkpoint (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let (dim, nx, ny) = (r.u32()? as usize, r.u32()? as usize, r.u32()? as usize);
    let (dx, dy, x0, y0) = (r.f64()?, r.f64()?, r.f64()?, r.f64()?);
    let codes = r.take::<4>()?;
    let kind = |c: u8| BoundaryKind::from_code(c).ok_or_else(|| bad(format!("boundary code {c}")));
    let boundary = [[kind(codes[0])?, kind(codes[1])?], [kind(codes[2])?, kind(codes[3])?]];
    let time = r.f64()?;
    let (mu, eta, beta) = (r.f64()?, r.f64()?, r.f64()?);
    let (a, gamma, rho_bar) = (r.f64()?, r.f64()?, r.f64()?);
    let n = r.u64()? as usize;

    if dim != 1 && dim != 2 {
        return Err(bad(format!("dimension {dim}")));
    }
    let grid = Grid::new(dim, &[nx, ny][..dim], &[dx, dy][..dim], &[x0, y0][..dim], &boundary[..dim])
        .map_err(|e| bad(format!("invalid grid: {e}")))?;
    if n != grid.len() {
        return Err(bad(format!("cell count {n} does not match {nx}x{ny}")));
    }
    let expected = HEADER_LEN + 8 * n * (1 + dim);
    if buf.len() != expected {
        return Err(bad(format!("expected {expected} bytes, found {}", buf.len())));
    }
    let mut field = || -> Result<Vec<f64>> { (0..n).map(|_| r.f64()).collect() };
    let rho = field()?;
    let comps = (0..dim).map(|_| field()).collect::<Result<Vec<_>>>()?;
    let params = FluidParams::new(
        ViscosityParams { mu, eta, beta },
        Isentropic { a, gamma, rho_bar },
    )
    .map_err(|e| bad(format!("invalid parameters: {e}")))?;
    let state = State::new(time, ScalarField::new(grid, rho)?, VectorField::new(grid, comps)?)?;

    let config_hash = fs::read_to_string(sidecar(path)).ok().and_then(|meta| {
        meta.lines()
            .find_map(|l| l.strip_prefix("config_hash = ").map(|h| h.trim().to_string()))
    });
    Ok(Checkpoint {
        state,
        params,
        config_hash,
    })
}
