//! Fourier multipliers, derivatives, products and norm functionals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{RealField, SpectralField};
use super::grid::SobolevIndex;
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `|x|^p` with `|0|^p := 0` for every `p`.
#[inline]
pub fn abs_pow(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(p)
    }
}

/// `sgn(x)` with `sgn(0) := 0`.
#[inline]
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Multiplies every coefficient by `m(ξ, η)` and zeroes the Nyquist lines.
pub fn apply_multiplier(
    f: &SpectralField,
    m: impl Fn(f64, f64) -> Complex64,
) -> Result<SpectralField> {
    let mut bad = None;
    let mut out = f.map_modes(|xi, eta, c| {
        let v = m(xi, eta);
        if !(v.re.is_finite() && v.im.is_finite()) && bad.is_none() {
            bad = Some((xi, eta));
        }
        v * c
    });
    if let Some((xi, eta)) = bad {
        return Err(Error::NonFinite(format!(
            "multiplier symbol at (ξ, η) = ({xi}, {eta})"
        )));
    }
    out.zero_nyquist();
    Ok(out)
}

/// Real-symbol multiplier that cannot fail; the caller guarantees finiteness.
pub(crate) fn apply_real(f: &SpectralField, m: impl Fn(f64, f64) -> f64) -> SpectralField {
    let mut out = f.map_modes(|xi, eta, c| c * m(xi, eta));
    out.zero_nyquist();
    out
}

/// `D_x^α`, symbol `|ξ|^α`.
pub fn apply_dx_alpha(f: &SpectralField, alpha: f64) -> Result<SpectralField> {
    if !(alpha.is_finite() && alpha >= -0.5) {
        return Err(Error::param("alpha", format!("order {alpha} must be >= -1/2")));
    }
    Ok(apply_real(f, |xi, _| abs_pow(xi, alpha)))
}

/// `D_y^δ`, symbol `|η|^δ`.
pub fn apply_dy_delta(f: &SpectralField, delta: f64) -> Result<SpectralField> {
    if !(delta.is_finite() && delta >= -0.5) {
        return Err(Error::param("delta", format!("order {delta} must be >= -1/2")));
    }
    Ok(apply_real(f, |_, eta| abs_pow(eta, delta)))
}

/// Hilbert transform in `x`, symbol `-i sgn ξ`.
pub fn apply_hilbert_x(f: &SpectralField) -> SpectralField {
    let mut out = f.map_modes(|xi, _, c| -I * sgn(xi) * c);
    out.zero_nyquist();
    out
}

/// Bessel potential `J^s`, symbol `(1 + ξ² + η²)^{s/2}`.
pub fn apply_bessel(f: &SpectralField, s: f64) -> SpectralField {
    apply_real(f, |xi, eta| (1.0 + xi * xi + eta * eta).powf(0.5 * s))
}

pub fn dx(f: &SpectralField) -> SpectralField {
    let mut out = f.map_modes(|xi, _, c| I * xi * c);
    out.zero_nyquist();
    out
}

pub fn dy(f: &SpectralField) -> SpectralField {
    let mut out = f.map_modes(|_, eta, c| I * eta * c);
    out.zero_nyquist();
    out
}

/// `‖f‖_{H^s}` with the weight of [`SobolevIndex::weight`].
pub fn sobolev_norm(f: &SpectralField, s: &SobolevIndex) -> f64 {
    let sum: f64 = f
        .grid
        .modes()
        .map(|(idx, xi, eta)| s.weight(xi, eta) * f.coeffs[idx].norm_sqr())
        .sum();
    (sum * f.parseval_weight()).sqrt()
}

/// Sup-norm diagnostics. The gradient term follows the `‖∂x‖ + ‖∂y‖` convention.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SupNorms {
    pub linf: f64,
    pub dx_inf: f64,
    pub dy_inf: f64,
    pub grad_inf: f64,
    pub w1inf: f64,
}

/// `L^∞` and `W^{1,∞}` with spectrally computed derivatives sampled on the grid.
pub fn sup_norms(u: &RealField) -> SupNorms {
    sup_norms_spectral(&u.forward())
}

pub fn sup_norms_spectral(f: &SpectralField) -> SupNorms {
    let linf = f.to_real_unchecked().linf();
    let dx_inf = dx(f).to_real_unchecked().linf();
    let dy_inf = dy(f).to_real_unchecked().linf();
    let grad_inf = dx_inf + dy_inf;
    SupNorms {
        linf,
        dx_inf,
        dy_inf,
        grad_inf,
        w1inf: linf + grad_inf,
    }
}

/// `‖∇u‖_{L^∞}` as `‖∂x u‖_∞ + ‖∂y u‖_∞`.
pub fn grad_inf(f: &SpectralField) -> f64 {
    dx(f).to_real_unchecked().linf() + dy(f).to_real_unchecked().linf()
}

/// Keeps mode `(j, k)` iff `3|j| < nx` and `3|k| < ny`.
pub fn dealias_mask(f: &SpectralField) -> SpectralField {
    let g = f.grid;
    let mut out = f.clone();
    for iy in 0..g.ny {
        let ky = g.mode_y(iy).unsigned_abs() as usize;
        for ix in 0..g.nx {
            let kx = g.mode_x(ix).unsigned_abs() as usize;
            if 3 * kx >= g.nx || 3 * ky >= g.ny {
                out.coeffs[iy * g.nx + ix] = Complex64::new(0.0, 0.0);
            }
        }
    }
    out
}

/// Product of two fields, evaluated alias-free on a 2x padded grid and
/// truncated back to the operands' lattice.
pub fn padded_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_grid(b)?;
    let fine = a.grid.refined(2)?;
    let ua = a.resample(fine).to_real_unchecked();
    let ub = b.resample(fine).to_real_unchecked();
    let prod: Vec<f64> = ua.samples.iter().zip(&ub.samples).map(|(x, y)| x * y).collect();
    let p = RealField {
        grid: fine,
        samples: prod,
    }
    .forward();
    Ok(p.resample(a.grid))
}

/// Product of fields on their own grid (pseudospectral, no dealiasing).
pub fn grid_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_grid(b)?;
    let ua = a.to_real_unchecked();
    let ub = b.to_real_unchecked();
    let prod: Vec<f64> = ua.samples.iter().zip(&ub.samples).map(|(x, y)| x * y).collect();
    Ok(RealField {
        grid: a.grid,
        samples: prod,
    }
    .forward())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::GridSpec;
    use std::f64::consts::PI;

    fn g2pi(n: usize) -> GridSpec {
        GridSpec::new(n, n, 2.0 * PI, 2.0 * PI).unwrap()
    }

    fn close(a: &RealField, f: impl Fn(f64, f64) -> f64, tol: f64) {
        let g = a.grid;
        for iy in 0..g.ny {
            for ix in 0..g.nx {
                let want = f(g.x(ix), g.y(iy));
                let got = a.samples[iy * g.nx + ix];
                assert!((got - want).abs() < tol, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn dx_alpha_on_cosine() {
        let g = g2pi(32);
        let u = RealField::from_fn(g, |x, _| (3.0 * x).cos());
        let v = apply_dx_alpha(&u.forward(), 0.5).unwrap().to_real().unwrap();
        close(&v, |x, _| 3f64.sqrt() * (3.0 * x).cos(), 1e-13);
        let c = RealField::from_fn(g, |_, _| 2.0).forward();
        assert!(apply_dx_alpha(&c, 0.7).unwrap().max_abs() == 0.0);
        assert!(apply_dx_alpha(&c, -0.3).unwrap().max_abs() == 0.0);
        assert!(apply_dx_alpha(&c, -0.6).is_err());
    }

    #[test]
    fn hilbert_on_cosine_and_constant() {
        let g = g2pi(16);
        let u = RealField::from_fn(g, |x, y| (2.0 * x).cos() + y.sin());
        let h = apply_hilbert_x(&u.forward()).to_real().unwrap();
        // sin(y) has zero ξ, so H kills it.
        close(&h, |x, _| (2.0 * x).sin(), 1e-13);
    }

    #[test]
    fn sup_norms_of_sine() {
        let g = g2pi(32);
        let s = sup_norms(&RealField::from_fn(g, |x, _| x.sin()));
        assert!((s.linf - 1.0).abs() < 1e-12);
        assert!((s.w1inf - 2.0).abs() < 1e-12);
        let c = sup_norms(&RealField::from_fn(g, |_, _| -1.5));
        assert!((c.linf - 1.5).abs() < 1e-14 && (c.w1inf - 1.5).abs() < 1e-12);
    }

    #[test]
    fn sobolev_single_mode() {
        let g = g2pi(32);
        let u = RealField::from_fn(g, |x, y| (2.0 * x + 3.0 * y).cos());
        let f = u.forward();
        let s = 1.3;
        let want = (1.0 + 4.0 + 9.0_f64).powf(s / 2.0) * u.l2();
        assert!((sobolev_norm(&f, &SobolevIndex::new(s)) - want).abs() < 1e-12 * want);
        assert!((sobolev_norm(&f, &SobolevIndex::new(0.0)) - u.l2()).abs() < 1e-12 * u.l2());
    }

    #[test]
    fn padded_product_is_exact_for_band_limited() {
        let g = g2pi(16);
        let a = RealField::from_fn(g, |x, y| (5.0 * x).cos() + (3.0 * y).sin());
        let b = RealField::from_fn(g, |x, _| (6.0 * x).sin());
        let p = padded_product(&a.forward(), &b.forward()).unwrap();
        // cos5x sin6x = (sin 11x + sin x)/2; sin11x is off the 16-lattice.
        let want = RealField::from_fn(g, |x, y| 0.5 * x.sin() + (3.0 * y).sin() * (6.0 * x).sin());
        assert!(p.sub(&want.forward()).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn non_finite_symbol_rejected() {
        let g = g2pi(8);
        let f = RealField::from_fn(g, |x, _| x.cos()).forward();
        let r = apply_multiplier(&f, |xi, _| Complex64::new(1.0 / xi, 0.0));
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }
}
