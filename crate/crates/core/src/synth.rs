//! Seeded test-data generators.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::{GridSpec, RealField, SpectralField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent uniform samples in `[-1, 1)`.
pub fn white_noise(grid: GridSpec, seed: u64) -> RealField {
    let mut r = rng(seed);
    let samples = (0..grid.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
    RealField { grid, samples }
}

/// Real field whose coefficients are complex Gaussians scaled by
/// `envelope(|(ξ, η)|)`, Hermitized, Nyquist lines zeroed, and scaled to unit
/// `L²` norm (unless identically zero).
pub fn random_spectrum(grid: GridSpec, seed: u64, envelope: impl Fn(f64, f64) -> f64) -> SpectralField {
    let mut r = rng(seed);
    let mut f = SpectralField::from_symbol(grid, |xi, eta| {
        let a: f64 = StandardNormal.sample(&mut r);
        let b: f64 = StandardNormal.sample(&mut r);
        Complex64::new(a, b) * envelope(xi, eta)
    });
    f.hermitize();
    f.zero_nyquist();
    let n = f.l2();
    if n > 0.0 {
        f = f.scaled(1.0 / n);
    }
    f
}

/// Smooth random field with Gaussian spectral envelope of width `k_width`.
pub fn smooth_random(grid: GridSpec, seed: u64, k_width: f64) -> SpectralField {
    random_spectrum(grid, seed, |xi, eta| {
        (-(xi * xi + eta * eta) / (2.0 * k_width * k_width)).exp()
    })
}

/// Random field supported in the disk `|(ξ, η)| ≤ k_max`.
pub fn band_limited(grid: GridSpec, seed: u64, k_max: f64) -> SpectralField {
    random_spectrum(grid, seed, |xi, eta| if xi.hypot(eta) <= k_max { 1.0 } else { 0.0 })
}

/// Smooth random field with `x`-spectrum confined to `|ξ| ≥ xi_min`.
pub fn smooth_random_off_axis(grid: GridSpec, seed: u64, k_width: f64, xi_min: f64) -> SpectralField {
    random_spectrum(grid, seed, |xi, eta| {
        if xi.abs() < xi_min {
            0.0
        } else {
            let d = xi.abs() - xi_min;
            (-(d * d + eta * eta) / (2.0 * k_width * k_width)).exp()
        }
    })
}

/// Random phases with `|û| = (1 + r²)^{-(s + 1 + γ)/2}`, so the field lies in
/// `H^σ` exactly for `σ < s + γ`. Unit `L²` norm.
pub fn synthetic_hs(grid: GridSpec, seed: u64, s: f64, gamma: f64) -> SpectralField {
    let mut r = rng(seed);
    let mut f = SpectralField::from_symbol(grid, |xi, eta| {
        let phase = r.gen_range(0.0..2.0 * PI);
        Complex64::from_polar((1.0 + xi * xi + eta * eta).powf(-(s + 1.0 + gamma) / 2.0), phase)
    });
    f.hermitize();
    f.zero_nyquist();
    let n = f.l2();
    f.scaled(1.0 / n)
}

/// `amp · exp(-((x-cx)² / wx² + (y-cy)² / wy²) / 2)`.
pub fn gaussian_bump(grid: GridSpec, amp: f64, center: (f64, f64), width: (f64, f64)) -> RealField {
    RealField::from_fn(grid, |x, y| {
        let (dx, dy) = ((x - center.0) / width.0, (y - center.1) / width.1);
        amp * (-0.5 * (dx * dx + dy * dy)).exp()
    })
}

/// Gaussian bump modulated by `cos(k0 (x - cx))`.
pub fn modulated_gaussian(
    grid: GridSpec,
    amp: f64,
    k0: f64,
    center: (f64, f64),
    width: (f64, f64),
) -> RealField {
    RealField::from_fn(grid, |x, y| {
        let (dx, dy) = ((x - center.0) / width.0, (y - center.1) / width.1);
        amp * (-0.5 * (dx * dx + dy * dy)).exp() * (k0 * (x - center.0)).cos()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sobolev_norm;
    use crate::spectral::SobolevIndex;

    #[test]
    fn generators_are_real_and_reproducible() {
        let g = GridSpec::new(32, 16, 10.0, 5.0).unwrap();
        let a = smooth_random(g, 7, 3.0);
        let b = smooth_random(g, 7, 3.0);
        assert_eq!(a, b);
        assert!(a.hermitian_residual() < 1e-15);
        assert!((a.l2() - 1.0).abs() < 1e-12);
        assert!(a.to_real().is_ok());
        assert_ne!(a, smooth_random(g, 8, 3.0));
    }

    #[test]
    fn off_axis_has_no_low_x_modes() {
        let g = GridSpec::new(64, 16, 20.0, 5.0).unwrap();
        let xi_min = 4.0 * g.dxi();
        let f = smooth_random_off_axis(g, 1, 1.0, xi_min);
        for (idx, xi, _) in g.modes() {
            if xi.abs() < xi_min {
                assert_eq!(f.coeffs[idx], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn synthetic_hs_sobolev_growth() {
        let g = GridSpec::square_2pi(64).unwrap();
        let f = synthetic_hs(g, 2, 1.0, 0.25);
        assert!(sobolev_norm(&f, &SobolevIndex::new(0.5)) < sobolev_norm(&f, &SobolevIndex::new(1.0)));
    }
}
