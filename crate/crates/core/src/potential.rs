//! Bulk free-energy densities and the functionals built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Field;

/// Shape of the bulk density `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialKind {
    /// `(φ² − 1)² / (4ε²)`
    DoubleWell,
    /// Flory–Huggins mixing energy with its logarithms replaced by quadratics
    /// outside `[σ, 1 − σ]`, scaled by `1/ε²`. Defined on all of ℝ.
    FloryHugginsReg { beta: f64, sigma: f64 },
    /// `F ≡ 0` apart from the additive constant. Turns every scheme into a
    /// linear flow, which is what the closed-form mode tests rely on.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    eps: f64,
    c_add: f64,
}

impl Potential {
    pub fn new(kind: PotentialKind, eps: f64, c_add: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                reason: format!("{eps} must be positive"),
            });
        }
        if !(c_add.is_finite() && c_add >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "c_add",
                reason: format!("{c_add} must be finite and non-negative"),
            });
        }
        if let PotentialKind::FloryHugginsReg { beta, sigma } = kind {
            if !beta.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "beta",
                    reason: "must be finite".into(),
                });
            }
            if !(sigma > 0.0 && sigma <= 0.5) {
                return Err(Error::InvalidParameter {
                    name: "sigma",
                    reason: format!("{sigma} is outside (0, 1/2]"),
                });
            }
        }
        Ok(Potential { kind, eps, c_add })
    }

    pub fn double_well(eps: f64, c_add: f64) -> Result<Self> {
        Potential::new(PotentialKind::DoubleWell, eps, c_add)
    }

    pub fn flory_huggins(eps: f64, beta: f64, sigma: f64, c_add: f64) -> Result<Self> {
        Potential::new(PotentialKind::FloryHugginsReg { beta, sigma }, eps, c_add)
    }

    pub fn constant(c_add: f64) -> Result<Self> {
        Potential::new(PotentialKind::Constant, 1.0, c_add)
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn c_add(&self) -> f64 {
        self.c_add
    }

    pub fn with_c_add(self, c_add: f64) -> Result<Self> {
        Potential::new(self.kind, self.eps, c_add)
    }

    fn inv_eps2(&self) -> f64 {
        1.0 / (self.eps * self.eps)
    }

    /// `F(φ)`, including the additive constant.
    pub fn density(&self, phi: f64) -> f64 {
        let s = self.inv_eps2();
        match self.kind {
            PotentialKind::DoubleWell => {
                let a = phi * phi - 1.0;
                0.25 * s * a * a + self.c_add
            }
            PotentialKind::FloryHugginsReg { beta, sigma } => {
                let mix = beta * (phi - phi * phi);
                let log_part = if phi >= 1.0 - sigma {
                    phi * phi.ln() + (1.0 - phi).powi(2) / (2.0 * sigma) + (1.0 - phi) * sigma.ln()
                        - 0.5 * sigma
                } else if phi > sigma {
                    phi * phi.ln() + (1.0 - phi) * (1.0 - phi).ln()
                } else {
                    (1.0 - phi) * (1.0 - phi).ln() + phi * phi / (2.0 * sigma) + phi * sigma.ln()
                        - 0.5 * sigma
                };
                s * (log_part + mix) + self.c_add
            }
            PotentialKind::Constant => self.c_add,
        }
    }

    /// `f(φ) = F′(φ)`
    pub fn derivative(&self, phi: f64) -> f64 {
        let s = self.inv_eps2();
        match self.kind {
            PotentialKind::DoubleWell => s * (phi * phi * phi - phi),
            PotentialKind::FloryHugginsReg { beta, sigma } => {
                let mix = beta * (1.0 - 2.0 * phi);
                let log_part = if phi >= 1.0 - sigma {
                    phi.ln() + 1.0 - (1.0 - phi) / sigma - sigma.ln()
                } else if phi > sigma {
                    phi.ln() - (1.0 - phi).ln()
                } else {
                    -(1.0 - phi).ln() - 1.0 + phi / sigma + sigma.ln()
                };
                s * (log_part + mix)
            }
            PotentialKind::Constant => 0.0,
        }
    }

    /// `f′(φ) = F″(φ)`
    pub fn second_derivative(&self, phi: f64) -> f64 {
        let s = self.inv_eps2();
        match self.kind {
            PotentialKind::DoubleWell => s * (3.0 * phi * phi - 1.0),
            PotentialKind::FloryHugginsReg { beta, sigma } => {
                let log_part = if phi >= 1.0 - sigma {
                    1.0 / phi + 1.0 / sigma
                } else if phi > sigma {
                    1.0 / phi + 1.0 / (1.0 - phi)
                } else {
                    1.0 / (1.0 - phi) + 1.0 / sigma
                };
                s * (log_part - 2.0 * beta)
            }
            PotentialKind::Constant => 0.0,
        }
    }

    /// [`Potential::density`] that refuses NaN input.
    pub fn try_density(&self, phi: f64) -> Result<f64> {
        reject_nan(phi)?;
        Ok(self.density(phi))
    }

    pub fn try_derivative(&self, phi: f64) -> Result<f64> {
        reject_nan(phi)?;
        Ok(self.derivative(phi))
    }

    pub fn try_second_derivative(&self, phi: f64) -> Result<f64> {
        reject_nan(phi)?;
        Ok(self.second_derivative(phi))
    }

    /// `f(φ)` evaluated at every node.
    pub fn derivative_field(&self, phi: &Field) -> Result<Field> {
        phi.check_finite("potential argument")?;
        phi.map(|v| self.derivative(v))
    }

    /// Quadrature of `F(φ)` over the grid, with no sign check.
    pub fn bulk_integral(&self, phi: &Field) -> Result<f64> {
        phi.check_finite("potential argument")?;
        let sum: f64 = phi.values().iter().map(|&v| self.density(v)).sum();
        let value = sum * phi.grid().cell_area();
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFinite("bulk energy"))
        }
    }

    /// `𝓕[φ] = ∫_Ω F(φ)`, required to be strictly positive.
    pub fn bulk_energy(&self, phi: &Field) -> Result<f64> {
        let value = self.bulk_integral(phi)?;
        if value > 0.0 {
            Ok(value)
        } else {
            Err(Error::NonPositiveBulk { value })
        }
    }

    /// `r[φ] = √𝓕[φ]`
    pub fn r_of_phi(&self, phi: &Field) -> Result<f64> {
        self.bulk_energy(phi).map(f64::sqrt)
    }

    /// Half the largest `f′` over `[lo, hi]`, floored at zero: a stabilization
    /// parameter that satisfies the original-energy condition as long as the
    /// field stays inside the bracket.
    pub fn suggest_s(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter {
                name: "phi_range",
                reason: format!("[{lo}, {hi}] is not a proper interval"),
            });
        }
        const SAMPLES: usize = 10_000;
        let mut candidates = vec![lo, hi];
        if let PotentialKind::FloryHugginsReg { sigma, .. } = self.kind {
            // f′ is monotone on each outer branch and convex in the middle,
            // so its maxima sit at endpoints or breakpoints.
            candidates.extend([sigma, 1.0 - sigma].into_iter().filter(|&b| b > lo && b < hi));
        }
        let step = (hi - lo) / SAMPLES as f64;
        candidates.extend((1..SAMPLES).map(|i| lo + i as f64 * step));
        let max = candidates
            .into_iter()
            .map(|p| self.second_derivative(p))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((0.5 * max).max(0.0))
    }
}

fn reject_nan(phi: f64) -> Result<()> {
    if phi.is_nan() {
        Err(Error::NonFinite("potential argument"))
    } else {
        Ok(())
    }
}
