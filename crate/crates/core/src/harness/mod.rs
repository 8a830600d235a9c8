//! Experiment configs, the experiment registry, CSV series and run
//! manifests.

mod config;
mod experiments;
mod manifest;
mod series;

pub use config::{ExperimentConfig, GridSpec, KornSettings, Perturbation, Tolerances};
pub use experiments::{
    convergence_order, describe, order_from_series, run_experiment, series_error,
    series_resolution, DEFAULT_OUT_DIR, EXPERIMENTS,
};
pub use manifest::{CheckResult, OutputFile, RunManifest};
pub use series::{read_series, write_series, SeriesRow, SERIES_HEADER};
