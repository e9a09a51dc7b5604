use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box `[0, lx) x [0, ly)` sampled on an `nx x ny` lattice.
///
/// Samples and Fourier coefficients share one flat layout: row-major in `y`
/// then `x`, so entry `(ix, iy)` lives at `iy * nx + ix`. Coefficient indices
/// use FFT ordering, i.e. index `i` carries the signed mode `i` for
/// `i < n/2` and `i - n` otherwise. Index `n/2` is the unpaired Nyquist mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 4 || !n.is_power_of_two() {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be a power of two and at least 4"
                )));
            }
        }
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("{name} = {l} must be positive")));
            }
        }
        Ok(Self { nx, ny, lx, ly })
    }

    /// Square `n x n` grid on a `2π`-periodic box (integer wavenumbers).
    pub fn square_2pi(n: usize) -> Result<Self> {
        Self::new(n, n, 2.0 * PI, 2.0 * PI)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    #[inline]
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    /// Frequency spacing in `x`, `2π / lx`.
    #[inline]
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.lx
    }

    #[inline]
    pub fn deta(&self) -> f64 {
        2.0 * PI / self.ly
    }

    /// Signed mode number of x-index `ix`.
    #[inline]
    pub fn mode_x(&self, ix: usize) -> i64 {
        signed_mode(ix, self.nx)
    }

    #[inline]
    pub fn mode_y(&self, iy: usize) -> i64 {
        signed_mode(iy, self.ny)
    }

    #[inline]
    pub fn xi(&self, ix: usize) -> f64 {
        self.dxi() * self.mode_x(ix) as f64
    }

    #[inline]
    pub fn eta(&self, iy: usize) -> f64 {
        self.deta() * self.mode_y(iy) as f64
    }

    /// Storage index of the signed mode pair `(j, k)`, if it is on the lattice.
    pub fn index_of_mode(&self, j: i64, k: i64) -> Option<usize> {
        let ix = unsigned_index(j, self.nx)?;
        let iy = unsigned_index(k, self.ny)?;
        Some(iy * self.nx + ix)
    }

    /// Storage index of `-k` for the mode stored at `idx`.
    #[inline]
    pub fn mirror_index(&self, idx: usize) -> usize {
        let ix = idx % self.nx;
        let iy = idx / self.nx;
        let mx = (self.nx - ix) % self.nx;
        let my = (self.ny - iy) % self.ny;
        my * self.nx + mx
    }

    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        idx % self.nx == self.nx / 2 || idx / self.nx == self.ny / 2
    }

    /// Largest lattice frequency magnitude `max |(ξ, η)|` (Nyquist excluded).
    pub fn max_radius(&self) -> f64 {
        let kx = self.dxi() * (self.nx / 2 - 1) as f64;
        let ky = self.deta() * (self.ny / 2 - 1) as f64;
        kx.hypot(ky)
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.dx() * ix as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.dy() * iy as f64
    }

    /// Same box with `factor` times as many points per direction.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.nx * factor, self.ny * factor, self.lx, self.ly)
    }

    /// `(index, ξ, η)` for every lattice mode.
    pub fn modes(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        (0..self.ny).flat_map(move |iy| {
            let eta = self.eta(iy);
            (0..self.nx).map(move |ix| (iy * self.nx + ix, self.xi(ix), eta))
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} on [0,{})x[0,{})", self.nx, self.ny, self.lx, self.ly)
    }
}

#[inline]
fn signed_mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[inline]
fn unsigned_index(j: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if j < -half || j >= half {
        return None;
    }
    Some(j.rem_euclid(n as i64) as usize)
}

/// Regularity threshold `3/2 + (1 - α)/4` above which the Cauchy problem is
/// locally well posed.
pub fn s_alpha(alpha: f64) -> f64 {
    1.5 + 0.25 * (1.0 - alpha)
}

/// Sobolev exponent, optionally anisotropic.
///
/// The isotropic weight is `(1 + ξ² + η²)^s`. With `aniso = Some((a, b))` the
/// weight is `(1 + ξ²)^a (1 + η²)^b` instead and `s` is ignored by the norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndex {
    pub s: f64,
    pub aniso: Option<(f64, f64)>,
}

impl SobolevIndex {
    pub fn new(s: f64) -> Self {
        Self { s, aniso: None }
    }

    pub fn anisotropic(a: f64, b: f64) -> Self {
        Self {
            s: a.max(b),
            aniso: Some((a, b)),
        }
    }

    pub fn threshold(alpha: f64) -> Self {
        Self::new(s_alpha(alpha))
    }

    #[inline]
    pub fn weight(&self, xi: f64, eta: f64) -> f64 {
        match self.aniso {
            None => (1.0 + xi * xi + eta * eta).powf(self.s),
            Some((a, b)) => (1.0 + xi * xi).powf(a) * (1.0 + eta * eta).powf(b),
        }
    }
}

impl From<f64> for SobolevIndex {
    fn from(s: f64) -> Self {
        Self::new(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(GridSpec::new(2, 8, 1.0, 1.0).is_err());
        assert!(GridSpec::new(12, 8, 1.0, 1.0).is_err());
        assert!(GridSpec::new(8, 8, 0.0, 1.0).is_err());
        assert!(GridSpec::new(8, 8, 1.0, f64::NAN).is_err());
        assert!(GridSpec::new(4, 8, 1.0, 1.0).is_ok());
    }

    #[test]
    fn mode_indexing_round_trips() {
        let g = GridSpec::new(8, 16, 2.0, 3.0).unwrap();
        for j in -4..4 {
            for k in -8..8 {
                let idx = g.index_of_mode(j, k).unwrap();
                assert_eq!(g.mode_x(idx % 8), j);
                assert_eq!(g.mode_y(idx / 8), k);
            }
        }
        assert!(g.index_of_mode(4, 0).is_none());
        assert!(g.index_of_mode(-5, 0).is_none());
        let idx = g.index_of_mode(3, -2).unwrap();
        assert_eq!(g.mirror_index(idx), g.index_of_mode(-3, 2).unwrap());
    }

    #[test]
    fn threshold_value() {
        assert_eq!(s_alpha(1.0), 1.5);
        assert!((s_alpha(0.5) - 1.625).abs() < 1e-15);
    }
}
