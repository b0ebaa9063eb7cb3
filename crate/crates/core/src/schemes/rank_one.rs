//! Linear systems of the form `D φ + w ⟨b, φ⟩ g = rhs`, where `D` is diagonal in
//! Fourier space. Every scheme in this crate reduces to one of these per step.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::{Field, Spectral};

/// `diag · φ + weight · ⟨b, φ⟩ · gb = rhs`
#[derive(Debug, Clone)]
pub struct RankOneSystem {
    /// Per-mode symbol of the diagonal part; every entry must be positive.
    pub diag: Vec<f64>,
    pub gb: Field,
    pub b: Field,
    pub rhs: Field,
    pub weight: f64,
}

impl RankOneSystem {
    fn validate(&self, spectral: &Spectral) -> Result<()> {
        let n = spectral.grid().len();
        if self.diag.len() != n {
            return Err(Error::ShapeMismatch {
                expected: n,
                got: self.diag.len(),
            });
        }
        if self.diag.iter().any(|&d| !(d.is_finite() && d > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "diag",
                reason: "diagonal symbol must be finite and positive".into(),
            });
        }
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return Err(Error::InvalidParameter {
                name: "weight",
                reason: format!("{} must be positive", self.weight),
            });
        }
        Ok(())
    }
}

/// Solves a [`RankOneSystem`] with two diagonal solves and a scalar
/// elimination of `⟨b, φ⟩`.
pub fn rank_one_solve(spectral: &Spectral, sys: &RankOneSystem) -> Result<Field> {
    sys.validate(spectral)?;
    let ainv = |f: &Field| -> Result<Field> {
        let mut hat = spectral.forward(f)?;
        for (c, &d) in hat.iter_mut().zip(&sys.diag) {
            *c /= d;
        }
        spectral.inverse(hat)
    };
    let ainv_gb = ainv(&sys.gb)?;
    let ainv_rhs = ainv(&sys.rhs)?;
    let s1 = spectral.inner(&sys.b, &ainv_gb)?;
    let s2 = spectral.inner(&sys.b, &ainv_rhs)?;
    let denom = 1.0 + sys.weight * s1;
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::Singular);
    }
    let b_phi = s2 / denom;
    ainv_rhs.lin_comb(1.0, &ainv_gb, -sys.weight * b_phi)
}

/// Largest grid (in nodes) the dense oracle accepts.
pub const DENSE_MAX_NODES: usize = 16 * 16;

/// Assembles the full real matrix of the operator `φ ↦ diag·φ + w⟨b, φ⟩ gb`.
/// The diagonal part is realized column by column through the transforms.
pub fn assemble_dense(spectral: &Spectral, sys: &RankOneSystem) -> Result<DMatrix<f64>> {
    let grid = *spectral.grid();
    if grid.nx() > 16 || grid.ny() > 16 {
        return Err(Error::GridTooLarge {
            nx: grid.nx(),
            ny: grid.ny(),
        });
    }
    sys.validate(spectral)?;
    let n = grid.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut unit = vec![0.0; n];
    for j in 0..n {
        unit[j] = 1.0;
        let col = spectral.apply_symbol(&Field::new(grid, unit.clone())?, &sys.diag, 1.0)?;
        unit[j] = 0.0;
        for (i, v) in col.values().iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    let w = sys.weight * grid.cell_area();
    for (i, gi) in sys.gb.values().iter().enumerate() {
        for (j, bj) in sys.b.values().iter().enumerate() {
            m[(i, j)] += w * gi * bj;
        }
    }
    Ok(m)
}

/// Reference solve by dense LU factorization. Only for grids up to 16×16.
pub fn dense_solve_oracle(spectral: &Spectral, sys: &RankOneSystem) -> Result<Field> {
    let m = assemble_dense(spectral, sys)?;
    let rhs = DVector::from_column_slice(sys.rhs.values());
    let x = m.lu().solve(&rhs).ok_or(Error::Singular)?;
    Field::new(*spectral.grid(), x.iter().copied().collect())
}
