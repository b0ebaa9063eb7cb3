//! Time loop with per-step diagnostics and file output.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::diagnostics::{record_step, StepRecord};
use crate::error::{Error, Result};
use crate::schemes::{Scheme, SchemeState, Stepper};

use super::config::{output_path, Resolved, RunConfig};
use super::init::initial_field;
use super::io::{create_parent, write_snapshot, SeriesWriter};

/// What a completed run leaves behind in memory.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<StepRecord>,
    pub final_state: SchemeState,
    pub snapshots: Vec<PathBuf>,
}

/// Builds the stepper and the step-0 state for a configuration.
pub fn prepare(cfg: &RunConfig) -> Result<(Stepper, SchemeState, Resolved)> {
    let resolved = cfg.resolve()?;
    let stepper = Stepper::new(resolved.grid, resolved.params)?;
    let phi0 = initial_field(&cfg.init, resolved.grid)?;
    let state = SchemeState::initial(resolved.scheme, phi0, &resolved.params.potential)?;
    Ok((stepper, state, resolved))
}

fn fail(step: usize, source: Error) -> Error {
    Error::StepFailed {
        step,
        source: Box::new(source),
    }
}

/// Takes `steps` steps without recording anything.
pub fn advance(stepper: &Stepper, mut state: SchemeState, steps: usize) -> Result<SchemeState> {
    for _ in 0..steps {
        let next = state.step + 1;
        state = stepper.step(&state).map_err(|e| fail(next, e))?;
    }
    Ok(state)
}

/// Final field of a configuration, with no output.
pub fn final_state(cfg: &RunConfig) -> Result<SchemeState> {
    let (stepper, state, resolved) = prepare(cfg)?;
    advance(&stepper, state, resolved.steps)
}

fn check_energy_law(scheme: Scheme, prev: &StepRecord, rec: &StepRecord) -> Result<()> {
    let tol = 1e-10 * prev.e_orig.abs().max(1.0);
    let detail = match scheme {
        Scheme::SavBe if rec.e_mod > prev.e_mod + tol => {
            format!("modified energy rose from {:e} to {:e}", prev.e_mod, rec.e_mod)
        }
        Scheme::IsavBe => match rec.d_be {
            Some(d) if d > tol => format!("original energy decrement {d:e} is positive"),
            _ => return Ok(()),
        },
        _ => return Ok(()),
    };
    Err(Error::EnergyLaw { step: rec.step, detail })
}

/// Runs a configuration to `t_end`, writing the energy series and any
/// requested snapshots. On a runtime failure the rows produced so far are
/// flushed before the error is returned.
pub fn run_simulation(cfg: &RunConfig) -> Result<RunOutput> {
    let (stepper, mut state, resolved) = prepare(cfg)?;
    let tau = resolved.params.tau;
    let every = cfg.outputs.record_every;

    let series_path = cfg.outputs.series_path.as_deref().map(output_path);
    let mut writer = match &series_path {
        Some(p) => {
            create_parent(p)?;
            let file = File::create(p).map_err(|e| Error::io(p, e))?;
            Some(SeriesWriter::new(BufWriter::new(file))?)
        }
        None => None,
    };

    let snap_steps: BTreeSet<usize> = cfg
        .outputs
        .field_snapshot_times
        .iter()
        .map(|t| (t / tau).round() as usize)
        .collect();
    let snap_dir = output_path(cfg.outputs.snapshot_dir.as_deref().unwrap_or(Path::new("snapshots")));
    let mut snapshots = Vec::new();
    let mut snapshot = |state: &SchemeState| -> Result<()> {
        if snap_steps.contains(&state.step) {
            let path = snap_dir.join(format!("phi_{:07}.txt", state.step));
            write_snapshot(&path, &state.phi, state.time(tau))?;
            snapshots.push(path);
        }
        Ok(())
    };

    let mut records = Vec::new();
    let mut last = record_step(&stepper, &state, None)?;
    snapshot(&state)?;
    if let Some(w) = writer.as_mut() {
        w.write(&last)?;
    }
    records.push(last.clone());

    let outcome = (|| -> Result<()> {
        for n in 1..=resolved.steps {
            state = stepper.step(&state).map_err(|e| fail(n, e))?;
            let rec = record_step(&stepper, &state, Some(&last)).map_err(|e| fail(n, e))?;
            if cfg.assert_energy {
                check_energy_law(state.scheme, &last, &rec)?;
            }
            snapshot(&state)?;
            if n % every == 0 || n == resolved.steps {
                if let Some(w) = writer.as_mut() {
                    w.write(&rec)?;
                }
                records.push(rec.clone());
            }
            last = rec;
        }
        Ok(())
    })();

    if let Some(w) = writer.as_mut() {
        w.flush()?;
    }
    outcome?;
    Ok(RunOutput {
        records,
        final_state: state,
        snapshots,
    })
}
