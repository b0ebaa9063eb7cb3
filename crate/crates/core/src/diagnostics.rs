//! Energies, energy decrements, auxiliary-variable drift and error norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::schemes::{Scheme, SchemeState, Stepper};
use crate::spectral::{Field, OperatorSymbols, Spectral};

/// `𝓔[φ] = ½‖∇φ‖² + ∫F(φ)`
pub fn original_energy(spectral: &Spectral, sym: &OperatorSymbols, phi: &Field, p: &Potential) -> Result<f64> {
    Ok(0.5 * spectral.quadratic_form(phi, &sym.lap)? + p.bulk_integral(phi)?)
}

/// BDF2 energy
/// `¼(‖∇φⁿ‖² + ‖∇(2φⁿ−φⁿ⁻¹)‖²) + ½[r[φⁿ]² + (2r[φⁿ] − r[φⁿ⁻¹])²] + (S/2)‖φⁿ − φⁿ⁻¹‖²`.
pub fn e2_energy(
    spectral: &Spectral,
    sym: &OperatorSymbols,
    phi: &Field,
    phi_prev: &Field,
    p: &Potential,
    s: f64,
) -> Result<f64> {
    let r = p.r_of_phi(phi)?;
    let r_prev = p.r_of_phi(phi_prev)?;
    let extrap = phi.lin_comb(2.0, phi_prev, -1.0)?;
    let diff = phi.sub(phi_prev)?;
    let grad = 0.25 * (spectral.quadratic_form(phi, &sym.lap)? + spectral.quadratic_form(&extrap, &sym.lap)?);
    let scalar = 0.5 * (r * r + (2.0 * r - r_prev).powi(2));
    Ok(grad + scalar + 0.5 * s * spectral.inner(&diff, &diff)?)
}

/// `‖u − reference‖_{H¹}` on the grid of `u`. A reference on another grid is
/// spectrally restricted (or interpolated) onto it first.
pub fn h1_error(u: &Field, reference: &Field) -> Result<f64> {
    let grid = *u.grid();
    let r = if reference.grid() == u.grid() {
        reference.clone()
    } else {
        Spectral::resample(reference, grid)?
    };
    let spectral = Spectral::new(grid);
    let sym = OperatorSymbols::new(&grid, 1.0, 1.0)?;
    Ok(spectral.norms(&u.sub(&r)?, &sym)?.h1)
}

/// Per-step diagnostics. Quantities that need history are `None` until it exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub t: f64,
    /// `𝓔[φⁿ]`
    pub e_orig: f64,
    /// Scheme-side modified energy: `½‖∇φⁿ‖² + (rⁿ)²` (Euler) or its BDF2
    /// analogue built from the scheme's scalars.
    pub e_mod: f64,
    /// `𝓔₂[φⁿ, φⁿ⁻¹]`
    pub e2: Option<f64>,
    /// `𝓔[φⁿ] − 𝓔[φⁿ⁻¹] + τ‖𝒢^{1/2}μⁿ‖²`
    pub d_be: Option<f64>,
    /// `𝓔₂[φⁿ,φⁿ⁻¹] − 𝓔₂[φⁿ⁻¹,φⁿ⁻²] + τ‖𝒢^{1/2}μⁿ‖²`
    pub d_bdf: Option<f64>,
    /// `r[φⁿ] − rⁿ` (SAV) or `r[φⁿ] − r̃ⁿ` (iSAV)
    pub r_drift: f64,
    pub mass: f64,
    pub min_phi: f64,
    pub max_phi: f64,
}

/// Builds a [`StepRecord`] for `state`, given the record of the previous level.
pub fn record_step(stepper: &Stepper, state: &SchemeState, prev: Option<&StepRecord>) -> Result<StepRecord> {
    let spectral = stepper.spectral();
    let sym = stepper.symbols();
    let params = stepper.params();
    let p = &params.potential;
    let phi = &state.phi;

    let grad_sq = spectral.quadratic_form(phi, &sym.lap)?;
    let bulk = p.bulk_integral(phi)?;
    let e_orig = 0.5 * grad_sq + bulk;
    let r_phi = if bulk > 0.0 { bulk.sqrt() } else { f64::NAN };

    let (e_mod, e2) = match (&state.phi_prev, state.scheme.is_bdf()) {
        (Some(prev_phi), true) => {
            let r_back = match state.scheme {
                Scheme::SavBdf => state.r_prev.unwrap_or(f64::NAN),
                _ => p.r_of_phi(prev_phi)?,
            };
            let extrap = phi.lin_comb(2.0, prev_phi, -1.0)?;
            let grad = 0.25 * (grad_sq + spectral.quadratic_form(&extrap, &sym.lap)?);
            let e_mod = grad + 0.5 * (state.r.powi(2) + (2.0 * state.r - r_back).powi(2));
            let s = params.effective_s(state.scheme);
            let e2 = e2_energy(spectral, sym, phi, prev_phi, p, s)?;
            (e_mod, Some(e2))
        }
        _ => (0.5 * grad_sq + state.r * state.r, None),
    };

    let dissipation = match &state.mu {
        Some(mu) => Some(params.tau * spectral.quadratic_form(mu, &sym.g_sym)?),
        None => None,
    };
    let d_be = match (prev, dissipation) {
        (Some(pr), Some(d)) => Some(e_orig - pr.e_orig + d),
        _ => None,
    };
    let d_bdf = match (prev.and_then(|pr| pr.e2), e2, dissipation) {
        (Some(a), Some(b), Some(d)) => Some(b - a + d),
        _ => None,
    };

    Ok(StepRecord {
        step: state.step,
        t: state.time(params.tau),
        e_orig,
        e_mod,
        e2,
        d_be,
        d_bdf,
        r_drift: r_phi - state.r,
        mass: phi.mean(),
        min_phi: phi.min(),
        max_phi: phi.max(),
    })
}

/// Relative residuals of the defining relations of one completed step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeResidual {
    /// Discrete time derivative plus `𝒢μⁿ⁺¹`.
    pub evolution: f64,
    /// Stored `μⁿ⁺¹` against the chemical-potential formula.
    pub chemical_potential: f64,
    /// The scalar auxiliary equation.
    pub scalar: f64,
}

impl SchemeResidual {
    pub fn max(&self) -> f64 {
        self.evolution.max(self.chemical_potential).max(self.scalar)
    }
}

/// Checks that `after` satisfies the relations of its scheme relative to `before`.
/// A BDF state produced from a state without history is checked against the
/// iSAV-BE relations used by the bootstrap.
pub fn scheme_residual(stepper: &Stepper, before: &SchemeState, after: &SchemeState) -> Result<SchemeResidual> {
    let spectral = stepper.spectral();
    let params = stepper.params();
    let p = &params.potential;
    let tau = params.tau;
    let mu = after.mu.as_ref().ok_or(Error::StateMismatch {
        scheme: after.scheme.name(),
        reason: "state has no chemical potential",
    })?;
    let l2 = |f: &Field| -> Result<f64> { Ok(spectral.inner(f, f)?.sqrt()) };
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { num };

    let bdf = after.scheme.is_bdf() && before.phi_prev.is_some();
    let improved = if bdf {
        after.scheme.is_improved()
    } else {
        after.scheme != Scheme::SavBe
    };
    let s = if improved { params.s } else { 0.0 };

    let explicit = match (&before.phi_prev, bdf) {
        (Some(prev), true) => before.phi.lin_comb(2.0, prev, -1.0)?,
        _ => before.phi.clone(),
    };
    let mut f = p.derivative_field(&explicit)?;
    if params.dealias {
        f = spectral.dealias_two_thirds(&f)?;
    }
    let b = f.scaled(1.0 / p.r_of_phi(&explicit)?);

    // (discrete derivative, stabilization direction, scalar combination)
    let (dt_phi, stab_dir, increment) = if bdf {
        let prev = before.phi_prev.as_ref().expect("checked above");
        let mut inc = after.phi.lin_comb(3.0, &before.phi, -4.0)?;
        inc.axpy(1.0, prev)?;
        let mut second = after.phi.lin_comb(1.0, &before.phi, -2.0)?;
        second.axpy(1.0, prev)?;
        (inc.scaled(1.0 / (2.0 * tau)), second, inc)
    } else {
        let inc = after.phi.sub(&before.phi)?;
        (inc.scaled(1.0 / tau), inc.clone(), inc)
    };

    let g_mu = stepper.apply_g(mu)?;
    let evolution = ratio(l2(&dt_phi.add(&g_mu)?)?, l2(&dt_phi)?.max(l2(&g_mu)?));

    let mut mu_check = stepper.apply_l(&after.phi)?;
    mu_check.axpy(after.r, &b)?;
    mu_check.axpy(s, &stab_dir)?;
    let chemical_potential = ratio(l2(&mu_check.sub(mu)?)?, l2(mu)?);

    let rhs = 0.5 * spectral.inner(&b, &increment)?;
    let lhs = if bdf {
        let (rn, rnm1) = if improved {
            let prev = before.phi_prev.as_ref().expect("checked above");
            (p.r_of_phi(&before.phi)?, p.r_of_phi(prev)?)
        } else {
            (before.r, before.r_prev.unwrap_or(f64::NAN))
        };
        3.0 * after.r - 4.0 * rn + rnm1
    } else {
        let rn = if improved { p.r_of_phi(&before.phi)? } else { before.r };
        after.r - rn
    };
    let scalar = ratio((lhs - rhs).abs(), after.r.abs().max(rhs.abs()));

    Ok(SchemeResidual {
        evolution,
        chemical_potential,
        scalar,
    })
}
