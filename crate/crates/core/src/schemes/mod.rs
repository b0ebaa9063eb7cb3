//! Time steppers for `∂φ/∂t = −𝒢μ`, `μ = −Δφ + f(φ)` with `𝒢 = γ(−Δ)^α`.
//!
//! Four schemes share one solver path:
//!
//! * `SavBe`: backward Euler with a carried auxiliary scalar `rⁿ`.
//! * `IsavBe`: backward Euler that re-evaluates `r[φⁿ] = √𝓕[φⁿ]` every step
//!   and adds `S(φⁿ⁺¹ − φⁿ)` to the chemical potential. Dissipates the
//!   original energy when `S` is large enough.
//! * `SavBdf`: BDF2 with carried `rⁿ, rⁿ⁻¹` and extrapolant `2φⁿ − φⁿ⁻¹`.
//! * `IsavBdf`: BDF2 with `r[φⁿ], r[φⁿ⁻¹]` and stabilization
//!   `S(φⁿ⁺¹ − 2φⁿ + φⁿ⁻¹)`.
//!
//! Eliminating `μⁿ⁺¹` and the new scalar leaves a [`RankOneSystem`] whose
//! diagonal part is `1 + τ𝒢(−Δ + S)` for Euler and `3 + 2τ𝒢(−Δ + S)` for
//! BDF2 (the BDF system is multiplied through by `2τ`).

mod rank_one;

pub use rank_one::{assemble_dense, dense_solve_oracle, rank_one_solve, RankOneSystem, DENSE_MAX_NODES};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::spectral::{Field, Grid, OperatorSymbols, Spectral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    SavBe,
    IsavBe,
    SavBdf,
    IsavBdf,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::SavBe, Scheme::IsavBe, Scheme::SavBdf, Scheme::IsavBdf];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SavBe => "sav-be",
            Scheme::IsavBe => "isav-be",
            Scheme::SavBdf => "sav-bdf",
            Scheme::IsavBdf => "isav-bdf",
        }
    }

    pub fn is_bdf(self) -> bool {
        matches!(self, Scheme::SavBdf | Scheme::IsavBdf)
    }

    /// iSAV schemes re-evaluate `r[φ]` instead of carrying a scalar.
    pub fn is_improved(self) -> bool {
        matches!(self, Scheme::IsavBe | Scheme::IsavBdf)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.name() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "scheme",
                reason: format!("unknown scheme `{s}`"),
            })
    }
}

/// Physical and numerical parameters of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub gamma: f64,
    /// Stabilization; ignored by the SAV schemes.
    pub s: f64,
    pub tau: f64,
    pub potential: Potential,
    /// Apply the 2/3 rule to `f(φ)` before it enters the solve.
    pub dealias: bool,
}

impl ModelParams {
    pub fn new(alpha: f64, gamma: f64, s: f64, tau: f64, potential: Potential) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "S",
                reason: format!("{s} must be finite and non-negative"),
            });
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("{tau} must be positive"),
            });
        }
        Ok(ModelParams {
            alpha,
            gamma,
            s,
            tau,
            potential,
            dealias: false,
        })
    }

    /// Stabilization actually used by `scheme`.
    pub fn effective_s(&self, scheme: Scheme) -> f64 {
        if scheme.is_improved() {
            self.s
        } else {
            0.0
        }
    }
}

/// Everything a scheme needs to advance, plus what the last step produced.
#[derive(Debug, Clone)]
pub struct SchemeState {
    pub scheme: Scheme,
    pub step: usize,
    pub phi: Field,
    /// `φⁿ⁻¹`; present for BDF states once the history is bootstrapped.
    pub phi_prev: Option<Field>,
    /// Auxiliary scalar at the current level: the carried `rⁿ` for SAV, the
    /// reported `r̃ⁿ` for iSAV (never fed back). Equals `r[φ⁰]` at step 0.
    pub r: f64,
    /// `rⁿ⁻¹` carried by SAV-BDF.
    pub r_prev: Option<f64>,
    /// `μⁿ` of the most recent step.
    pub mu: Option<Field>,
}

impl SchemeState {
    pub fn initial(scheme: Scheme, phi0: Field, potential: &Potential) -> Result<Self> {
        let r = potential.r_of_phi(&phi0)?;
        Ok(SchemeState {
            scheme,
            step: 0,
            phi: phi0,
            phi_prev: None,
            r,
            r_prev: None,
            mu: None,
        })
    }

    pub fn time(&self, tau: f64) -> f64 {
        self.step as f64 * tau
    }

    fn expect(&self, scheme: Scheme) -> Result<()> {
        if self.scheme == scheme {
            Ok(())
        } else {
            Err(Error::StateMismatch {
                scheme: scheme.name(),
                reason: "state carries a different scheme tag",
            })
        }
    }
}

/// Owns the spectral machinery for a grid and advances [`SchemeState`]s.
#[derive(Debug, Clone)]
pub struct Stepper {
    spectral: Spectral,
    symbols: OperatorSymbols,
    params: ModelParams,
}

/// Data shared by the four update formulas.
struct Nonlinear {
    /// `b = f(φ̂)/√𝓕[φ̂]` at the explicit level `φ̂`.
    b: Field,
    gb: Field,
}

impl Stepper {
    pub fn new(grid: Grid, params: ModelParams) -> Result<Self> {
        let symbols = OperatorSymbols::new(&grid, params.alpha, params.gamma)?;
        ModelParams::new(params.alpha, params.gamma, params.s, params.tau, params.potential)?;
        Ok(Stepper {
            spectral: Spectral::new(grid),
            symbols,
            params,
        })
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn symbols(&self) -> &OperatorSymbols {
        &self.symbols
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        self.spectral.grid()
    }

    /// `𝓛φ = −Δφ`
    pub fn apply_l(&self, phi: &Field) -> Result<Field> {
        self.spectral.apply_symbol(phi, &self.symbols.lap, 1.0)
    }

    /// `𝒢u = γ(−Δ)^α u`
    pub fn apply_g(&self, u: &Field) -> Result<Field> {
        self.spectral.apply_symbol(u, &self.symbols.g_sym, 1.0)
    }

    fn nonlinear(&self, explicit: &Field) -> Result<Nonlinear> {
        let p = &self.params.potential;
        let root = p.bulk_energy(explicit)?.sqrt();
        let mut f = p.derivative_field(explicit)?;
        if self.params.dealias {
            f = self.spectral.dealias_two_thirds(&f)?;
        }
        let b = f.scaled(1.0 / root);
        let gb = self.apply_g(&b)?;
        Ok(Nonlinear { b, gb })
    }

    /// Per-mode `lead + scale·τ·g(|k|² + S)`.
    fn diag(&self, lead: f64, scale: f64, s: f64) -> Vec<f64> {
        let t = scale * self.params.tau;
        self.symbols
            .g_sym
            .iter()
            .zip(&self.symbols.lap)
            .map(|(g, l)| lead + t * g * (l + s))
            .collect()
    }

    /// Shared Euler update: solves
    /// `[I + τ𝒢(𝓛+S)]φ + (τ/2)⟨b,φ⟩𝒢b = (I + τS𝒢)φⁿ − τ(r_ref − ½⟨b,φⁿ⟩)𝒢b`
    /// and returns `(φⁿ⁺¹, r_new, b)` with `r_new = r_ref + ½⟨b, φⁿ⁺¹ − φⁿ⟩`.
    ///
    /// The system is solved for `δ = φⁿ⁺¹ − φⁿ`, whose right-hand side reduces
    /// to `−τ𝒢(𝓛φⁿ + r_ref·b)`. Rounding then scales with the increment rather
    /// than with `φ`, which matters once the spatial error reaches roundoff.
    fn euler_update(&self, phi: &Field, r_ref: f64, s: f64) -> Result<(Field, f64, Field)> {
        let tau = self.params.tau;
        let nl = self.nonlinear(phi)?;
        let mut v = self.apply_l(phi)?;
        v.axpy(r_ref, &nl.b)?;
        let rhs = self.apply_g(&v)?.scaled(-tau);
        let sys = RankOneSystem {
            diag: self.diag(1.0, 1.0, s),
            gb: nl.gb,
            b: nl.b,
            rhs,
            weight: 0.5 * tau,
        };
        let delta = rank_one_solve(&self.spectral, &sys)?;
        let r_new = r_ref + 0.5 * self.spectral.inner(&sys.b, &delta)?;
        Ok((phi.add(&delta)?, r_new, sys.b))
    }

    /// Shared BDF2 update with `r_combo = 4r̄ⁿ − r̄ⁿ⁻¹` and stabilization `s`:
    /// `[3 + 2τ𝒢(𝓛+S)]φ + τ⟨b*,φ⟩𝒢b* = hist + 2τS𝒢φ* − 2τ(r_combo/3 − ⟨b*,hist⟩/6)𝒢b*`
    /// with `hist = 4φⁿ − φⁿ⁻¹`. Returns `(φⁿ⁺¹, r_new, b*)`.
    ///
    /// Solved for `δ = φⁿ⁺¹ − φ*`; with `d = φⁿ − φⁿ⁻¹` the right-hand side is
    /// `−2d − 2τ𝒢𝓛φ* − (2τ/3)(r_combo + ⟨b*,d⟩)𝒢b*`.
    fn bdf_update(&self, phi: &Field, phi_prev: &Field, r_combo: f64, s: f64) -> Result<(Field, f64, Field)> {
        let tau = self.params.tau;
        let d = phi.sub(phi_prev)?;
        let star = phi.add(&d)?;
        let nl = self.nonlinear(&star)?;
        let b_d = self.spectral.inner(&nl.b, &d)?;
        let mut rhs = self.apply_g(&self.apply_l(&star)?)?.scaled(-2.0 * tau);
        rhs.axpy(-2.0, &d)?;
        rhs.axpy(-2.0 * tau / 3.0 * (r_combo + b_d), &nl.gb)?;
        let sys = RankOneSystem {
            diag: self.diag(3.0, 2.0, s),
            gb: nl.gb,
            b: nl.b,
            rhs,
            weight: tau,
        };
        let delta = rank_one_solve(&self.spectral, &sys)?;
        // r^{n+1} = r_combo/3 + ½⟨b*, φⁿ⁺¹⟩ − ⅙⟨b*, hist⟩, and 3φⁿ⁺¹ − hist = 3δ + 2d
        let r_new = (r_combo + 0.5 * (3.0 * self.spectral.inner(&sys.b, &delta)? + 2.0 * b_d)) / 3.0;
        Ok((star.add(&delta)?, r_new, sys.b))
    }

    /// `μ = 𝓛φⁿ⁺¹ + r·b + S·stab`
    fn chemical_potential(&self, next: &Field, r: f64, b: &Field, stab: Option<(f64, Field)>) -> Result<Field> {
        let mut mu = self.apply_l(next)?;
        mu.axpy(r, b)?;
        if let Some((s, d)) = stab {
            if s != 0.0 {
                mu.axpy(s, &d)?;
            }
        }
        Ok(mu)
    }

    pub fn step_sav_be(&self, state: &SchemeState) -> Result<SchemeState> {
        state.expect(Scheme::SavBe)?;
        let (next, r_new, b) = self.euler_update(&state.phi, state.r, 0.0)?;
        let mu = self.chemical_potential(&next, r_new, &b, None)?;
        Ok(SchemeState {
            scheme: Scheme::SavBe,
            step: state.step + 1,
            phi: next,
            phi_prev: None,
            r: r_new,
            r_prev: None,
            mu: Some(mu),
        })
    }

    pub fn step_isav_be(&self, state: &SchemeState) -> Result<SchemeState> {
        state.expect(Scheme::IsavBe)?;
        let s = self.params.s;
        let r_ref = self.params.potential.r_of_phi(&state.phi)?;
        let (next, r_tilde, b) = self.euler_update(&state.phi, r_ref, s)?;
        let inc = next.sub(&state.phi)?;
        let mu = self.chemical_potential(&next, r_tilde, &b, Some((s, inc)))?;
        Ok(SchemeState {
            scheme: Scheme::IsavBe,
            step: state.step + 1,
            phi: next,
            phi_prev: None,
            r: r_tilde,
            r_prev: None,
            mu: Some(mu),
        })
    }

    fn history<'a>(&self, state: &'a SchemeState, scheme: Scheme) -> Result<&'a Field> {
        state.expect(scheme)?;
        state.phi_prev.as_ref().ok_or(Error::StateMismatch {
            scheme: scheme.name(),
            reason: "BDF step needs φⁿ⁻¹; bootstrap first",
        })
    }

    pub fn step_sav_bdf(&self, state: &SchemeState) -> Result<SchemeState> {
        let prev = self.history(state, Scheme::SavBdf)?;
        let r_prev = state.r_prev.ok_or(Error::StateMismatch {
            scheme: "sav-bdf",
            reason: "missing rⁿ⁻¹",
        })?;
        let (next, r_new, b) = self.bdf_update(&state.phi, prev, 4.0 * state.r - r_prev, 0.0)?;
        let mu = self.chemical_potential(&next, r_new, &b, None)?;
        Ok(SchemeState {
            scheme: Scheme::SavBdf,
            step: state.step + 1,
            phi_prev: Some(state.phi.clone()),
            phi: next,
            r: r_new,
            r_prev: Some(state.r),
            mu: Some(mu),
        })
    }

    pub fn step_isav_bdf(&self, state: &SchemeState) -> Result<SchemeState> {
        let prev = self.history(state, Scheme::IsavBdf)?;
        let p = &self.params.potential;
        let s = self.params.s;
        let combo = 4.0 * p.r_of_phi(&state.phi)? - p.r_of_phi(prev)?;
        let (next, r_tilde, b) = self.bdf_update(&state.phi, prev, combo, s)?;
        // φⁿ⁺¹ − 2φⁿ + φⁿ⁻¹
        let mut second = next.lin_comb(1.0, &state.phi, -2.0)?;
        second.axpy(1.0, prev)?;
        let mu = self.chemical_potential(&next, r_tilde, &b, Some((s, second)))?;
        Ok(SchemeState {
            scheme: Scheme::IsavBdf,
            step: state.step + 1,
            phi_prev: Some(state.phi.clone()),
            phi: next,
            r: r_tilde,
            r_prev: None,
            mu: Some(mu),
        })
    }

    /// Advances `state` by one step. A BDF state without history is first
    /// bootstrapped with one iSAV-BE step.
    pub fn step(&self, state: &SchemeState) -> Result<SchemeState> {
        match state.scheme {
            Scheme::SavBe => self.step_sav_be(state),
            Scheme::IsavBe => self.step_isav_be(state),
            Scheme::SavBdf | Scheme::IsavBdf if state.phi_prev.is_none() => {
                let mut start = state.clone();
                start.scheme = Scheme::IsavBe;
                let be = self.step_isav_be(&start)?;
                bootstrap_bdf(&state.phi, &be, state.scheme, &self.params.potential)
            }
            Scheme::SavBdf => self.step_sav_bdf(state),
            Scheme::IsavBdf => self.step_isav_bdf(state),
        }
    }
}

/// Builds a BDF state at level 1 from `φ⁰` and one completed iSAV-BE step.
/// For SAV-BDF the carried scalars become `r⁰ = r[φ⁰]` and `r¹ = r̃¹`.
pub fn bootstrap_bdf(phi0: &Field, be: &SchemeState, target: Scheme, potential: &Potential) -> Result<SchemeState> {
    if !target.is_bdf() {
        return Err(Error::StateMismatch {
            scheme: target.name(),
            reason: "bootstrap target must be a BDF scheme",
        });
    }
    be.expect(Scheme::IsavBe)?;
    let r0 = potential.r_of_phi(phi0)?;
    Ok(SchemeState {
        scheme: target,
        step: be.step,
        phi: be.phi.clone(),
        phi_prev: Some(phi0.clone()),
        r: be.r,
        r_prev: Some(r0),
        mu: be.mu.clone(),
    })
}

#[cfg(test)]
mod tests;
