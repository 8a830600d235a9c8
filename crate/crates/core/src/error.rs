use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Shapes, grids or dimensions do not line up.
    #[error("structural error: {0}")]
    Structural(String),

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate field: {0}")]
    DegenerateField(String),

    #[error("inadmissible test pair: {0}")]
    Admissibility(String),

    #[error("time step collapsed to {dt:e} at cell {cell} (t = {time})")]
    TimeStepCollapse { cell: usize, dt: f64, time: f64 },

    #[error("solver diverged at t = {time}: {reason}")]
    Divergence { time: f64, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error came out of the time integrator.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Divergence { .. } | Error::TimeStepCollapse { .. }
        )
    }
}
