//! Fourier pseudo-spectral solvers for gradient flows
//! `∂φ/∂t = −𝒢μ`, `μ = −Δφ + F′(φ)` on periodic rectangles, time stepped
//! with scalar-auxiliary-variable (SAV) schemes and their improved (iSAV)
//! variants that dissipate the original free energy.
//!
//! The pieces, bottom up:
//!
//! * [`spectral`]: grids, fields, FFT-diagonal operators, quadrature.
//! * [`potential`]: double-well and regularized Flory–Huggins densities.
//! * [`schemes`]: the four steppers and their rank-one linear solve.
//! * [`diagnostics`]: energies, decrements, drift, H¹ errors.
//! * [`harness`]: run configuration, experiment presets, CSV output and
//!   convergence studies.

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod potential;
pub mod schemes;
pub mod spectral;

pub use diagnostics::{e2_energy, h1_error, original_energy, record_step, StepRecord};
pub use error::{Error, Result};
pub use potential::{Potential, PotentialKind};
pub use schemes::{ModelParams, RankOneSystem, Scheme, SchemeState, Stepper};
pub use spectral::{Field, Grid, OperatorSymbols, Spectral};
