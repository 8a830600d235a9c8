//! Time loop with a fixed save cadence.

use crate::error::{Error, Result};
use crate::relentropy::{fill_running_columns, DiagnosticsRecord};

use super::scheme::{stable_dt, step, SchemeOptions};
use super::{FluidParams, Forcing, State};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub t_final: f64,
    /// Interval between saved frames; the last frame lands on `t_final`.
    pub save_every: f64,
    pub scheme: SchemeOptions,
    /// Keep the full state at every saved frame, not only the last one.
    pub retain_states: bool,
}

impl RunSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Config(format!("t_final = {} must be > 0", self.t_final)));
        }
        if !(self.save_every > 0.0 && self.save_every <= self.t_final) {
            return Err(Error::Config(format!(
                "save_every = {} must lie in (0, t_final]",
                self.save_every
            )));
        }
        self.scheme.validate()
    }

    /// Save times `0, s, 2s, …, t_final` relative to the start.
    fn save_times(&self) -> Vec<f64> {
        let n = (self.t_final / self.save_every * (1.0 - 1e-12)).ceil() as usize;
        let mut out: Vec<f64> = (0..n).map(|k| k as f64 * self.save_every).collect();
        out.push(self.t_final);
        out
    }
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub record: DiagnosticsRecord,
    pub state: Option<State>,
}

/// Saved frames of one run, in strictly increasing time.
#[derive(Clone, Debug)]
pub struct Trajectory {
    frames: Vec<Frame>,
    final_state: State,
    steps: usize,
}

impl Trajectory {
    /// Assembles a trajectory from frames and fills the time-integrated
    /// columns of their records.
    pub fn new(mut frames: Vec<Frame>, final_state: State, steps: usize) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::Structural("trajectory has no frames".into()));
        }
        if frames.windows(2).any(|w| !(w[1].record.time > w[0].record.time)) {
            return Err(Error::Structural("frame times must increase strictly".into()));
        }
        let mut records: Vec<DiagnosticsRecord> = frames.iter().map(|f| f.record.clone()).collect();
        fill_running_columns(&mut records)?;
        for (f, r) in frames.iter_mut().zip(records) {
            f.record = r;
        }
        Ok(Self {
            frames,
            final_state,
            steps,
        })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn records(&self) -> impl Iterator<Item = &DiagnosticsRecord> {
        self.frames.iter().map(|f| &f.record)
    }

    pub fn times(&self) -> Vec<f64> {
        self.records().map(|r| r.time).collect()
    }

    /// Saved states, or a structural error when the run kept only the last.
    pub fn states(&self) -> Result<Vec<&State>> {
        self.frames
            .iter()
            .map(|f| {
                f.state
                    .as_ref()
                    .ok_or_else(|| Error::Structural("trajectory did not retain states".into()))
            })
            .collect()
    }

    pub fn final_state(&self) -> &State {
        &self.final_state
    }

    /// Number of time steps taken.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Total mass removed by the density floor.
    pub fn clipped_mass(&self) -> f64 {
        self.frames.last().map_or(0.0, |f| f.record.clipped_mass)
    }
}

/// Integrates from `initial` to `initial.time + t_final`, calling `diagnose`
/// with the state and the cumulative clipped mass at every save time.
pub fn run<D>(
    initial: State,
    params: &FluidParams,
    forcing: &dyn Forcing,
    settings: &RunSettings,
    mut diagnose: D,
) -> Result<Trajectory>
where
    D: FnMut(&State, f64) -> Result<DiagnosticsRecord>,
{
    settings.validate()?;
    let t0 = initial.time;
    let mut frames = Vec::new();
    let mut clipped = 0.0;
    let mut steps = 0;
    let mut state = initial;
    for (k, rel) in settings.save_times().into_iter().enumerate() {
        let target = t0 + rel;
        if k > 0 {
            while state.time < target {
                let mut dt = stable_dt(&state, params, &settings.scheme)?;
                // Land on the save time exactly, and do not leave a sliver.
                if state.time + dt * 1.05 >= target {
                    dt = target - state.time;
                }
                let out = step(&state, dt, params, forcing, &settings.scheme)?;
                state = out.state;
                if state.time + 1e-14 * target.abs().max(1.0) >= target {
                    state.time = target;
                }
                clipped += out.clipped_mass;
                steps += 1;
            }
        }
        let record = diagnose(&state, clipped)?;
        frames.push(Frame {
            record,
            state: settings.retain_states.then(|| state.clone()),
        });
    }
    Trajectory::new(frames, state, steps)
}
