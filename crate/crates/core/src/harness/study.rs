//! Convergence studies and scheme comparisons.

use rayon::prelude::*;

use crate::diagnostics::{h1_error, StepRecord};
use crate::error::{Error, Result};
use crate::schemes::Scheme;
use crate::spectral::Field;

use super::config::RunConfig;
use super::io::SERIES_HEADER;
use super::run::{final_state, run_simulation};

/// Resolutions to sweep: time steps at a fixed grid, or square grid sizes at a
/// fixed time step.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Taus(Vec<f64>),
    Grids(Vec<usize>),
}

/// How the reference solution is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSpec {
    /// Time-step sweeps: SAV-BDF at this step on the base grid.
    pub tau_ref: f64,
    /// Grid sweeps: the base scheme on this grid at the base time step.
    pub n_ref: usize,
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        ReferenceSpec {
            tau_ref: 1e-5,
            n_ref: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRow {
    /// `τ` or `N`.
    pub resolution: f64,
    pub steps: usize,
    pub h1_error: f64,
    /// Observed order against the previous row.
    pub order: Option<f64>,
}

pub fn reference_config(base: &RunConfig, sweep: &Sweep, spec: &ReferenceSpec) -> RunConfig {
    match sweep {
        Sweep::Taus(_) => base.quiet().with_scheme(Scheme::SavBdf).with_tau(spec.tau_ref),
        Sweep::Grids(_) => base.quiet().with_grid(spec.n_ref, spec.n_ref),
    }
}

fn member_config(base: &RunConfig, sweep: &Sweep, i: usize) -> RunConfig {
    match sweep {
        Sweep::Taus(t) => base.quiet().with_tau(t[i]),
        Sweep::Grids(n) => base.quiet().with_grid(n[i], n[i]),
    }
}

fn sweep_len(sweep: &Sweep) -> usize {
    match sweep {
        Sweep::Taus(t) => t.len(),
        Sweep::Grids(n) => n.len(),
    }
}

fn resolution(sweep: &Sweep, i: usize) -> f64 {
    match sweep {
        Sweep::Taus(t) => t[i],
        Sweep::Grids(n) => n[i] as f64,
    }
}

/// H¹ errors at `t_end` of each sweep member against `reference`.
pub fn convergence_against(base: &RunConfig, sweep: &Sweep, reference: &Field) -> Result<Vec<StudyRow>> {
    let n = sweep_len(sweep);
    if n == 0 {
        return Err(Error::config("sweep", "no resolutions given"));
    }
    let configs: Vec<RunConfig> = (0..n).map(|i| member_config(base, sweep, i)).collect();
    for c in &configs {
        c.resolve()?;
    }
    let results: Vec<Result<(usize, f64)>> = configs
        .par_iter()
        .map(|c| {
            let state = final_state(c)?;
            Ok((state.step, h1_error(&state.phi, reference)?))
        })
        .collect();

    let mut rows: Vec<StudyRow> = Vec::with_capacity(n);
    for (i, res) in results.into_iter().enumerate() {
        let (steps, err) = res?;
        let h = resolution(sweep, i);
        let order = rows.last().map(|p| {
            let ratio = match sweep {
                Sweep::Taus(_) => p.resolution / h,
                Sweep::Grids(_) => h / p.resolution,
            };
            (p.h1_error / err).ln() / ratio.ln()
        });
        rows.push(StudyRow {
            resolution: h,
            steps,
            h1_error: err,
            order,
        });
    }
    Ok(rows)
}

/// Runs the reference and every sweep member, then tabulates H¹ errors and
/// observed orders.
pub fn convergence_study(base: &RunConfig, sweep: &Sweep, spec: &ReferenceSpec) -> Result<Vec<StudyRow>> {
    let reference = final_state(&reference_config(base, sweep, spec))?;
    convergence_against(base, sweep, &reference.phi)
}

pub fn study_to_csv(sweep: &Sweep, rows: &[StudyRow]) -> String {
    let col = match sweep {
        Sweep::Taus(_) => "tau",
        Sweep::Grids(_) => "N",
    };
    let mut s = format!("{col},steps,h1_error,order\n");
    for r in rows {
        let order = r.order.map(|o| format!("{o:.4}")).unwrap_or_default();
        s.push_str(&format!("{},{},{:e},{}\n", r.resolution, r.steps, r.h1_error, order));
    }
    s
}

/// Two runs on a common time axis.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub labels: [String; 2],
    pub a: Vec<StepRecord>,
    pub b: Vec<StepRecord>,
}

/// Runs two configurations that share grid, `τ` and `t_end`.
pub fn compare_schemes(a: &RunConfig, b: &RunConfig) -> Result<Comparison> {
    if a.tau != b.tau {
        return Err(Error::config("tau", format!("time steps differ: {} vs {}", a.tau, b.tau)));
    }
    if a.t_end != b.t_end {
        return Err(Error::config("t_end", format!("final times differ: {} vs {}", a.t_end, b.t_end)));
    }
    if a.grid != b.grid {
        return Err(Error::config("grid", "grids differ"));
    }
    let mut qa = a.quiet();
    let mut qb = b.quiet();
    qa.outputs.record_every = a.outputs.record_every;
    qb.outputs.record_every = b.outputs.record_every;
    let (ra, rb) = rayon::join(|| run_simulation(&qa), || run_simulation(&qb));
    let labels = if a.scheme == b.scheme {
        ["a".to_string(), "b".to_string()]
    } else {
        [a.scheme.name().replace('-', "_"), b.scheme.name().replace('-', "_")]
    };
    Ok(Comparison {
        labels,
        a: ra?.records,
        b: rb?.records,
    })
}

impl Comparison {
    /// `step,t` followed by each run's columns prefixed with its label.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["step".to_string(), "t".to_string()];
        for l in &self.labels {
            header.extend(SERIES_HEADER[2..].iter().map(|h| format!("{l}_{h}")));
        }
        let mut s = header.join(",");
        s.push('\n');
        let cells = |r: &StepRecord| -> Vec<String> {
            let o = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            vec![
                format!("{:e}", r.e_orig),
                format!("{:e}", r.e_mod),
                o(r.e2),
                o(r.d_be),
                o(r.d_bdf),
                format!("{:e}", r.r_drift),
                format!("{:e}", r.mass),
                format!("{:e}", r.min_phi),
                format!("{:e}", r.max_phi),
            ]
        };
        for (ra, rb) in self.a.iter().zip(&self.b) {
            let mut row = vec![ra.step.to_string(), format!("{:e}", ra.t)];
            row.extend(cells(ra));
            row.extend(cells(rb));
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}
