//! Uniform periodic grids, real fields on them, and the Fourier machinery that
//! turns constant-coefficient operators into per-mode multiplications.
//!
//! Layout is row-major over `(x, y)` nodes: value `(ix, iy)` sits at
//! `ix * ny + iy`, with `x = ix * hx` and `y = iy * hy`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// A uniform `nx × ny` periodic grid on `[0, lx) × [0, ly)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be even and at least 4"
                )));
            }
        }
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("{name} = {l} must be positive")));
            }
        }
        Ok(Grid { nx, ny, lx, ly })
    }

    /// Square grid on `[0, l)²`.
    pub fn square(n: usize, l: f64) -> Result<Self> {
        Grid::new(n, n, l, l)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Quadrature weight of a single node.
    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 * self.hx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        iy as f64 * self.hy()
    }

    pub fn kx(&self, ix: usize) -> f64 {
        2.0 * PI / self.lx * signed_index(ix, self.nx) as f64
    }

    pub fn ky(&self, iy: usize) -> f64 {
        2.0 * PI / self.ly * signed_index(iy, self.ny) as f64
    }

    /// Wavenumbers along x in FFT ordering.
    pub fn kx_all(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.kx(i)).collect()
    }

    pub fn ky_all(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.ky(j)).collect()
    }
}

/// FFT ordering: `0, 1, …, n/2, −n/2+1, …, −1` with the Nyquist index mapped to `−n/2`.
fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// A real scalar field sampled at the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field values"));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Field {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for ix in 0..grid.nx {
            let x = grid.x(ix);
            for iy in 0..grid.ny {
                values.push(f(x, grid.y(iy)));
            }
        }
        Field::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.grid.ny + iy]
    }

    /// Pointwise map; the result is checked for finiteness.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        Field::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn map_unchecked(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(what))
        }
    }

    fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        self.same_grid(other)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&u, &v)| a * u + b * v)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.lin_comb(1.0, other, 1.0)
    }

    /// In place `self += a·other`.
    pub fn axpy(&mut self, a: f64, other: &Field) -> Result<()> {
        self.same_grid(other)?;
        for (u, &v) in self.values.iter_mut().zip(&other.values) {
            *u += a * v;
        }
        Ok(())
    }

    pub fn scaled(&self, a: f64) -> Field {
        self.map_unchecked(|v| a * v)
    }

    /// Spatial average `|Ω|⁻¹ ∫ u`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Nodal quadrature of `∫_Ω u`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }
}

/// Per-mode symbols of `−Δ` and of the dissipation operator `γ(−Δ)^α`.
#[derive(Debug, Clone)]
pub struct OperatorSymbols {
    pub alpha: f64,
    pub gamma: f64,
    /// `|k|²`
    pub lap: Vec<f64>,
    /// `γ|k|^{2α}`
    pub g_sym: Vec<f64>,
    /// `γ^{1/2}|k|^α`
    pub sqrt_g: Vec<f64>,
    /// `|k|`
    pub sqrt_l: Vec<f64>,
}

impl OperatorSymbols {
    pub fn new(grid: &Grid, alpha: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("{alpha} is outside [0, 1]"),
            });
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("{gamma} must be positive"),
            });
        }
        let kx = grid.kx_all();
        let ky = grid.ky_all();
        let mut lap = Vec::with_capacity(grid.len());
        for &a in &kx {
            for &b in &ky {
                lap.push(a * a + b * b);
            }
        }
        let g_sym: Vec<f64> = lap
            .iter()
            .map(|&k2| if alpha == 0.0 { gamma } else { gamma * k2.powf(alpha) })
            .collect();
        let sqrt_g = g_sym.iter().map(|g| g.sqrt()).collect();
        let sqrt_l = lap.iter().map(|k2| k2.sqrt()).collect();
        Ok(OperatorSymbols {
            alpha,
            gamma,
            lap,
            g_sym,
            sqrt_g,
            sqrt_l,
        })
    }

    pub fn len(&self) -> usize {
        self.lap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lap.is_empty()
    }
}

/// Norms reported by [`Spectral::norms`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub grad_l2: f64,
    pub h1: f64,
    /// `‖𝒢^{1/2} u‖`
    pub g_half: f64,
}

/// FFT plans for one grid. Cheap to clone; plans are shared and thread safe.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            grid,
            fwd_x: planner.plan_fft_forward(grid.nx),
            inv_x: planner.plan_fft_inverse(grid.nx),
            fwd_y: planner.plan_fft_forward(grid.ny),
            inv_y: planner.plan_fft_inverse(grid.ny),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn check(&self, u: &Field) -> Result<()> {
        if *u.grid() == self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn transform(&self, data: &mut [Complex64], along_y: &dyn Fft<f64>, along_x: &dyn Fft<f64>) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        along_y.process(data);
        let mut t = vec![Complex64::new(0.0, 0.0); nx * ny];
        for ix in 0..nx {
            for iy in 0..ny {
                t[iy * nx + ix] = data[ix * ny + iy];
            }
        }
        along_x.process(&mut t);
        for ix in 0..nx {
            for iy in 0..ny {
                data[ix * ny + iy] = t[iy * nx + ix];
            }
        }
    }

    /// Unnormalized forward DFT.
    pub fn forward(&self, u: &Field) -> Result<Vec<Complex64>> {
        self.check(u)?;
        let mut data: Vec<Complex64> = u.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, self.fwd_y.as_ref(), self.fwd_x.as_ref());
        Ok(data)
    }

    /// Inverse DFT (normalized by `1/N`), keeping the real part.
    pub fn inverse(&self, mut hat: Vec<Complex64>) -> Result<Field> {
        if hat.len() != self.grid.len() {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len(),
                got: hat.len(),
            });
        }
        self.transform(&mut hat, self.inv_y.as_ref(), self.inv_x.as_ref());
        let scale = 1.0 / self.grid.len() as f64;
        Field::new(self.grid, hat.iter().map(|c| c.re * scale).collect())
    }

    /// `F⁻¹[sign · symbol · F[u]]`.
    pub fn apply_symbol(&self, u: &Field, symbol: &[f64], sign: f64) -> Result<Field> {
        if symbol.len() != self.grid.len() {
            return Err(Error::ShapeMismatch {
                expected: self.grid.len(),
                got: symbol.len(),
            });
        }
        let mut hat = self.forward(u)?;
        for (c, &s) in hat.iter_mut().zip(symbol) {
            *c *= sign * s;
        }
        self.inverse(hat)
    }

    /// Nodal quadrature `hx·hy·Σ uᵢⱼ vᵢⱼ`.
    pub fn inner(&self, u: &Field, v: &Field) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(dot(&u.values, &v.values) * self.grid.cell_area())
    }

    /// `Σ_k s_k |û_k|²` scaled so that the identity symbol reproduces [`Spectral::inner`]`(u, u)`.
    pub fn quadratic_form(&self, u: &Field, symbol: &[f64]) -> Result<f64> {
        let hat = self.forward(u)?;
        Ok(self.quadratic_form_hat(&hat, symbol))
    }

    fn quadratic_form_hat(&self, hat: &[Complex64], symbol: &[f64]) -> f64 {
        let s: f64 = hat.iter().zip(symbol).map(|(c, &w)| w * c.norm_sqr()).sum();
        s * self.grid.cell_area() / self.grid.len() as f64
    }

    pub fn norms(&self, u: &Field, sym: &OperatorSymbols) -> Result<Norms> {
        u.check_finite("norm argument")?;
        let hat = self.forward(u)?;
        let l2sq = self.inner(u, u)?;
        let gradsq = self.quadratic_form_hat(&hat, &sym.lap);
        let gsq = self.quadratic_form_hat(&hat, &sym.g_sym);
        Ok(Norms {
            l2: l2sq.sqrt(),
            grad_l2: gradsq.sqrt(),
            h1: (l2sq + gradsq).sqrt(),
            g_half: gsq.sqrt(),
        })
    }

    /// Zeroes every mode whose index exceeds a third of the grid size in either direction.
    pub fn dealias_two_thirds(&self, u: &Field) -> Result<Field> {
        let (nx, ny) = (self.grid.nx as i64, self.grid.ny as i64);
        let mut hat = self.forward(u)?;
        for ix in 0..self.grid.nx {
            let px = signed_index(ix, self.grid.nx).abs();
            for iy in 0..self.grid.ny {
                let py = signed_index(iy, self.grid.ny).abs();
                if 3 * px > nx || 3 * py > ny {
                    hat[ix * self.grid.ny + iy] = Complex64::new(0.0, 0.0);
                }
            }
        }
        self.inverse(hat)
    }

    /// Spectral interpolation (zero padding) or restriction (truncation) of `u`
    /// onto `target`. Both grids must cover the same domain.
    pub fn resample(u: &Field, target: Grid) -> Result<Field> {
        let src = *u.grid();
        if src.lx != target.lx || src.ly != target.ly {
            return Err(Error::GridMismatch);
        }
        if src == target {
            return Ok(u.clone());
        }
        let hat = Spectral::new(src).forward(u)?;
        let scale = target.len() as f64 / src.len() as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); target.len()];
        let xs = split_modes(src.nx, target.nx);
        let ys = split_modes(src.ny, target.ny);
        for (ix, xmodes) in xs.iter().enumerate() {
            for &(tx, wx) in xmodes {
                for (iy, ymodes) in ys.iter().enumerate() {
                    for &(ty, wy) in ymodes {
                        out[tx * target.ny + ty] += hat[ix * src.ny + iy] * (wx * wy * scale);
                    }
                }
            }
        }
        Spectral::new(target).inverse(out)
    }
}

/// For every source index, the target indices (with weights) it contributes to.
/// The source Nyquist mode is split evenly between `±n/2`; target Nyquist
/// collects both signs; modes beyond the target Nyquist are dropped.
fn split_modes(n_src: usize, n_dst: usize) -> Vec<Vec<(usize, f64)>> {
    let half_dst = (n_dst / 2) as i64;
    (0..n_src)
        .map(|j| {
            let p = signed_index(j, n_src);
            let parts: Vec<(i64, f64)> = if j == n_src / 2 {
                vec![(p, 0.5), (-p, 0.5)]
            } else {
                vec![(p, 1.0)]
            };
            parts
                .into_iter()
                .filter(|(q, _)| q.abs() <= half_dst)
                .map(|(q, w)| (q.rem_euclid(n_dst as i64) as usize, w))
                .collect()
        })
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
