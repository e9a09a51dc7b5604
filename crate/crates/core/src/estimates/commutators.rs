//! Commutator and product inequalities, and the skew-adjointness of the
//! dispersive operator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimates::line::Line;
use crate::propagator::{check_alpha, dispersion_symbol};
use crate::spectral::{apply_bessel, apply_multiplier, grad_inf, padded_product, SpectralField};

/// Right sides below this count as zero.
const RHS_FLOOR: f64 = 1e-14;

/// `‖J^s(fg) - f J^s g‖_{L²}` over
/// `‖∇f‖_∞ ‖J^{s-1}g‖_{L²} + ‖J^s f‖_{L²} ‖g‖_∞`; products are alias-free.
pub fn kato_ponce_ratio(f: &SpectralField, g: &SpectralField, s: f64) -> Result<f64> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Error::param("s", format!("{s} must be >= 1")));
    }
    let lhs = apply_bessel(&padded_product(f, g)?, s)
        .sub(&padded_product(f, &apply_bessel(g, s))?)?
        .l2();
    let rhs = grad_inf(f) * apply_bessel(g, s - 1.0).l2()
        + apply_bessel(f, s).l2() * g.to_real_unchecked().linf();
    Ok(if rhs < RHS_FLOOR { 0.0 } else { lhs / rhs })
}

/// `‖D^σ(fg)‖_{L²}` over `‖D^σ f‖_{L²}‖g‖_∞ + ‖D^σ g‖_{L²}‖f‖_∞` on a
/// periodic line.
pub fn leibniz_ratio(f: &Line, g: &Line, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::param("sigma", format!("{sigma} must lie in (0, 1)")));
    }
    for (name, u) in [("f", f), ("g", g)] {
        if u.mean().abs() > 1e-12 * u.l2().max(f64::MIN_POSITIVE) {
            return Err(Error::Precondition(format!("{name} must have zero mean")));
        }
    }
    let lhs = f.padded_product(g)?.apply_d(sigma).l2();
    let rhs = f.apply_d(sigma).l2() * g.linf() + g.apply_d(sigma).l2() * f.linf();
    Ok(if rhs < RHS_FLOOR { 0.0 } else { lhs / rhs })
}

/// `|(Lu, u)| / (‖u‖ ‖Lu‖)` with `L = D_x^α ∂x + H ∂yy`, symbol `-iρ`.
/// Zero when the denominator vanishes.
pub fn skew_adjoint_residual(u: &SpectralField, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let lu = apply_multiplier(u, |xi, eta| Complex64::new(0.0, -dispersion_symbol(xi, eta, alpha)))?;
    let den = u.l2() * lu.l2();
    if den == 0.0 {
        return Ok(0.0);
    }
    // Real part of (Lu, u); the imaginary part only appears for complex u.
    Ok(lu.inner(u)?.norm() / den)
}
