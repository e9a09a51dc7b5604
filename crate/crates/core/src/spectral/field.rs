use std::f64::consts::PI;

use num_complex::Complex64;

use super::fft;
use super::grid::GridSpec;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative Hermitian residual above which `inverse_transform` refuses input.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Real samples on a [`GridSpec`], layout `iy * nx + ix`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    pub grid: GridSpec,
    pub samples: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut samples = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            for ix in 0..grid.nx {
                samples.push(f(grid.x(ix), y));
            }
        }
        Self { grid, samples }
    }

    pub fn linf(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l1(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn l2(&self) -> f64 {
        (self.samples.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    /// Grid `L^p` norm; `p = ∞` is the sample maximum.
    pub fn lp(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.linf();
        }
        let sum: f64 = self.samples.iter().map(|v| v.abs().powf(p)).sum();
        (sum * self.grid.cell_area()).powf(1.0 / p)
    }

    pub fn integral(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn forward(&self) -> SpectralField {
        transform_samples(&self.grid, &self.samples)
    }
}

/// Fourier coefficients approximating the continuous transform
/// `û(ξ, η) = (2π)^{-1} ∫ u e^{-i(xξ + yη)}`.
///
/// With this scaling `‖u‖²_{L²} = (2π)²/(lx ly) Σ |û|²` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
}

/// Forward transform of real samples.
pub fn forward_transform(grid: &GridSpec, samples: &[f64]) -> Result<SpectralField> {
    if samples.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    Ok(transform_samples(grid, samples))
}

fn transform_samples(grid: &GridSpec, samples: &[f64]) -> SpectralField {
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::plan(grid.nx, grid.ny).forward(&mut data);
    let scale = grid.cell_area() / (2.0 * PI);
    for c in &mut data {
        *c *= scale;
    }
    SpectralField {
        grid: *grid,
        coeffs: data,
    }
}

/// Inverse transform; rejects coefficients that do not describe a real field.
pub fn inverse_transform(f: &SpectralField) -> Result<Vec<f64>> {
    let residual = f.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NonHermitian { residual });
    }
    Ok(f.to_real_unchecked().samples)
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    /// Field built from its symbol: `coeffs[idx] = f(ξ, η)`.
    pub fn from_symbol(grid: GridSpec, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let coeffs = grid.modes().map(|(_, xi, eta)| f(xi, eta)).collect();
        Self { grid, coeffs }
    }

    pub fn to_real(&self) -> Result<RealField> {
        Ok(RealField {
            grid: self.grid,
            samples: inverse_transform(self)?,
        })
    }

    /// Real part of the inverse transform, no symmetry check.
    pub fn to_real_unchecked(&self) -> RealField {
        let data = self.complex_samples();
        RealField {
            grid: self.grid,
            samples: data.into_iter().map(|c| c.re).collect(),
        }
    }

    /// Complex samples of the inverse transform.
    pub fn complex_samples(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        fft::plan(self.grid.nx, self.grid.ny).inverse(&mut data);
        let scale = 2.0 * PI / self.grid.area();
        for c in &mut data {
            *c *= scale;
        }
        data
    }

    /// `‖Im u‖ / ‖u‖` of the inverse transform (0 for the zero field).
    pub fn imaginary_residue(&self) -> f64 {
        let data = self.complex_samples();
        let (mut re, mut im) = (0.0, 0.0);
        for c in &data {
            re += c.re * c.re;
            im += c.im * c.im;
        }
        if re + im == 0.0 {
            0.0
        } else {
            (im / (re + im)).sqrt()
        }
    }

    /// `max |û(k) - conj û(-k)| / max |û|`.
    pub fn hermitian_residual(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for (idx, c) in self.coeffs.iter().enumerate() {
            let m = self.coeffs[self.grid.mirror_index(idx)];
            worst = worst.max((c - m.conj()).norm());
        }
        worst / scale
    }

    /// Replaces every coefficient by the Hermitian average `(û(k) + conj û(-k))/2`.
    pub fn hermitize(&mut self) {
        let old = self.coeffs.clone();
        for (idx, c) in self.coeffs.iter_mut().enumerate() {
            *c = 0.5 * (old[idx] + old[self.grid.mirror_index(idx)].conj());
        }
    }

    pub fn zero_nyquist(&mut self) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for iy in 0..ny {
            self.coeffs[iy * nx + nx / 2] = ZERO;
        }
        let row = (ny / 2) * nx;
        for c in &mut self.coeffs[row..row + nx] {
            *c = ZERO;
        }
    }

    /// `Σ |û|² (2π)²/(lx ly)`, the squared `L²` norm.
    pub fn l2_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.parseval_weight()
    }

    pub fn l2(&self) -> f64 {
        self.l2_squared().sqrt()
    }

    #[inline]
    pub fn parseval_weight(&self) -> f64 {
        (2.0 * PI).powi(2) / self.grid.area()
    }

    /// `∫ u dx dy = 2π û(0, 0)`.
    pub fn mean_integral(&self) -> f64 {
        2.0 * PI * self.coeffs[0].re
    }

    /// `(2π)²/(lx ly) Σ û conj v̂`, the `L²` inner product.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_grid(other)?;
        let s: Complex64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.parseval_weight())
    }

    pub(crate) fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: other.grid.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(self.zip_with(other, |x, y| x + a * y))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub(crate) fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Coefficient-wise map with access to `(ξ, η)`; no Nyquist handling.
    pub fn map_modes(&self, mut f: impl FnMut(f64, f64, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .grid
            .modes()
            .map(|(idx, xi, eta)| f(xi, eta, self.coeffs[idx]))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Same function on a grid with `factor` times more points per axis
    /// (spectral zero padding). Coefficients are grid-independent, so padding
    /// is a plain copy.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        let fine = self.grid.refined(factor)?;
        Ok(self.resample(fine))
    }

    /// Copies every shared mode into `target` (same box, any resolution).
    /// Modes absent from `target` are dropped and the Nyquist lines zeroed.
    pub fn resample(&self, target: GridSpec) -> Self {
        let mut out = Self::zeros(target);
        let g = &self.grid;
        for iy in 0..g.ny {
            let k = g.mode_y(iy);
            for ix in 0..g.nx {
                let j = g.mode_x(ix);
                if let Some(t) = target.index_of_mode(j, k) {
                    out.coeffs[t] = self.coeffs[iy * g.nx + ix];
                }
            }
        }
        out.zero_nyquist();
        if target.nx > g.nx || target.ny > g.ny {
            // The source's own Nyquist lines are unpaired; drop them.
            for iy in 0..g.ny {
                for ix in 0..g.nx {
                    if g.is_nyquist(iy * g.nx + ix) {
                        if let Some(t) = target.index_of_mode(g.mode_x(ix), g.mode_y(iy)) {
                            out.coeffs[t] = ZERO;
                        }
                    }
                }
            }
        }
        out
    }
}
