//! CSV output of diagnostics series.
//!
//! Floats are written as the shortest decimal that parses back to the same
//! value; negative zero is written as `0.0`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relentropy::{DiagnosticsRecord, RemainderBreakdown};

/// Header of every series CSV, in column order.
pub const SERIES_HEADER: [&str; 16] = [
    "time",
    "mass",
    "energy",
    "dissipation",
    "rel_entropy",
    "rem_convective",
    "rem_viscous",
    "rem_force",
    "rem_entropy",
    "rem_pressure",
    "rem_friction",
    "rem_total",
    "rei_residual",
    "gronwall_h",
    "gronwall_env",
    "clipped_mass",
];

/// One CSV row. Field order is the column order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRow {
    pub time: f64,
    pub mass: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub rel_entropy: f64,
    pub rem_convective: f64,
    pub rem_viscous: f64,
    pub rem_force: f64,
    pub rem_entropy: f64,
    pub rem_pressure: f64,
    pub rem_friction: f64,
    pub rem_total: f64,
    pub rei_residual: f64,
    pub gronwall_h: f64,
    pub gronwall_env: f64,
    pub clipped_mass: f64,
}

impl From<&DiagnosticsRecord> for SeriesRow {
    fn from(r: &DiagnosticsRecord) -> Self {
        let RemainderBreakdown {
            convective,
            viscous,
            force,
            entropy,
            pressure,
            friction,
            total,
        } = r.remainder;
        let z = |v: f64| v + 0.0;
        SeriesRow {
            time: z(r.time),
            mass: z(r.mass),
            energy: z(r.energy),
            dissipation: z(r.dissipation),
            rel_entropy: z(r.rel_entropy),
            rem_convective: z(convective),
            rem_viscous: z(viscous),
            rem_force: z(force),
            rem_entropy: z(entropy),
            rem_pressure: z(pressure),
            rem_friction: z(friction),
            rem_total: z(total),
            rei_residual: z(r.rei_residual),
            gronwall_h: z(r.gronwall_h),
            gronwall_env: z(r.gronwall_env),
            clipped_mass: z(r.clipped_mass),
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}

pub fn write_series<'a, I>(records: I, path: &Path) -> Result<()>
where
    I: IntoIterator<Item = &'a DiagnosticsRecord>,
{
    let rows: Vec<SeriesRow> = records.into_iter().map(SeriesRow::from).collect();
    if rows.is_empty() {
        return Err(Error::Structural(format!("no records to write to {}", path.display())));
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in &rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a series CSV back, insisting on the exact header.
pub fn read_series(path: &Path) -> Result<Vec<SeriesRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().ne(SERIES_HEADER) {
        let missing = SERIES_HEADER.iter().find(|h| !header.iter().any(|x| x == **h));
        return Err(Error::Format {
            path: path.to_path_buf(),
            reason: match missing {
                Some(h) => format!("missing column `{h}`"),
                None => "columns out of order".into(),
            },
        });
    }
    r.deserialize()
        .collect::<std::result::Result<Vec<SeriesRow>, _>>()
        .map_err(|e| csv_error(path, e))
}
