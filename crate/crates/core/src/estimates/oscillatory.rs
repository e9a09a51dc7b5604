//! `J(λ) = ∫_0^∞ ξ^{(α-1)/2} e^{iλξ} e^{-iξ^{1+α}} dξ`.
//!
//! For a damping `δ > 0` the damped integral `J_δ` (extra factor `e^{-δξ}`)
//! is computed on `[0, ξ_U]` by graded Gauss–Legendre panels, and the tail
//! `[ξ_U, ∞)` is rotated onto the vertical ray `ξ_U - iσy`, where the
//! integrand decays like `e^{φ'(ξ_U) y}` once `ξ_U` is past the stationary
//! point. Three dampings `δ0, δ0/2, δ0/4` are then Richardson-extrapolated to
//! `δ = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::check_alpha;
use crate::quadrature::gauss_legendre;

/// Largest number of real-axis panels one damped evaluation may use.
pub const PANEL_BUDGET: usize = 1_000_000;

/// Largest accepted relative extrapolation residual.
pub const RESIDUAL_LIMIT: f64 = 0.05;

const NODES: usize = 16;

/// Extrapolated `J(λ)` with its error indicator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JValue {
    pub value: Complex64,
    /// `|J₃ - J₂| / |J₃|` between three- and two-point extrapolants.
    pub residual: f64,
    /// Real-axis panels per damped evaluation.
    pub panels: usize,
}

/// Phase `σ(λξ - ξ^p)` and amplitude `ξ^{(α-1)/2}` at complex `ξ`.
struct Integrand {
    lambda: f64,
    alpha: f64,
    sign: f64,
    delta: f64,
}

impl Integrand {
    fn p(&self) -> f64 {
        1.0 + self.alpha
    }

    fn eval(&self, xi: Complex64) -> Complex64 {
        let i = Complex64::i();
        let phase = self.sign * (self.lambda * xi - xi.powf(self.p()));
        xi.powf(0.5 * (self.alpha - 1.0)) * (i * phase - self.delta * xi).exp()
    }

    /// Same integrand after `ξ = v^{2/(1+α)}`, where the endpoint power and
    /// the Jacobian cancel to the constant `2/(1+α)`.
    fn eval_substituted(&self, v: f64) -> Complex64 {
        let xi = v.powf(2.0 / self.p());
        let phase = self.sign * (self.lambda * xi - xi.powf(self.p()));
        2.0 / self.p() * Complex64::from_polar((-self.delta * xi).exp(), phase)
    }

    /// `φ'(ξ) = λ - pξ^α` (before the sign flip).
    fn phase_slope(&self, xi: f64) -> f64 {
        self.lambda - self.p() * xi.powf(self.alpha)
    }
}

fn gl_panel(nodes: &(Vec<f64>, Vec<f64>), a: f64, b: f64, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.0.iter().zip(&nodes.1) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Stationary point of `λξ - ξ^{1+α}`, 0 when `λ ≤ 0`.
pub fn stationary_point(lambda: f64, alpha: f64) -> f64 {
    if lambda > 0.0 {
        (lambda / (1.0 + alpha)).powf(1.0 / alpha)
    } else {
        0.0
    }
}

/// Panel layout on `[ξ_a, ξ_U]`: each panel carries at most `π/2` of phase
/// and at most doubles `ξ`.
fn real_panels(f: &Integrand, xa: f64, xu: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut a = xa;
    let (p, al) = (f.p(), f.alpha);
    while a < xu {
        let slope = f.phase_slope(a).abs();
        // Curvature bound keeps panels short across the stationary point.
        let curv = p * al * a.powf(al - 1.0);
        let h = (0.5 * std::f64::consts::PI / slope.max(1e-300))
            .min((std::f64::consts::PI / curv.max(1e-300)).sqrt())
            .min(a);
        let b = (a + h).min(xu);
        out.push((a, b));
        a = b;
        if out.len() > PANEL_BUDGET {
            return Err(Error::Oscillatory(format!(
                "lambda = {} needs more than {PANEL_BUDGET} panels for alpha = {al}; \
                 lambda is too extreme for the quadrature budget",
                f.lambda
            )));
        }
    }
    Ok(out)
}

/// Damped integral `J_δ` with phase sign `σ = ±1`.
fn damped(f: &Integrand, xa: f64, xu: f64, panels: &[(f64, f64)], nodes: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    // [0, ξ_a] in v = ξ^{(1+α)/2}, geometrically graded toward 0.
    let va = xa.powf(0.5 * f.p());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut hi = va;
    for _ in 0..60 {
        let lo = 0.5 * hi;
        acc += gl_panel(nodes, lo, hi, |v| f.eval_substituted(v));
        hi = lo;
    }
    acc += gl_panel(nodes, 0.0, hi, |v| f.eval_substituted(v));

    for &(a, b) in panels {
        acc += gl_panel(nodes, a, b, |x| f.eval(Complex64::new(x, 0.0)));
    }

    // Tail on ξ = ξ_U - iσy, dξ = -iσ dy.
    let rate = f.phase_slope(xu).abs();
    let y_max = 40.0 / rate;
    let n_tail = 80;
    let dir = Complex64::new(0.0, -f.sign);
    for k in 0..n_tail {
        let (a, b) = (y_max * k as f64 / n_tail as f64, y_max * (k + 1) as f64 / n_tail as f64);
        acc += dir * gl_panel(nodes, a, b, |y| f.eval(Complex64::new(xu, 0.0) + dir * y));
    }
    acc
}

/// `J(λ)` for order `α`; `phase_sign = -1` integrates the complex conjugate
/// phase `e^{-iλξ} e^{+iξ^{1+α}}`.
pub fn oscillatory_integral(lambda: f64, alpha: f64, phase_sign: f64) -> Result<JValue> {
    check_alpha(alpha)?;
    if !lambda.is_finite() {
        return Err(Error::param("lambda", format!("{lambda} is not finite")));
    }
    if phase_sign.abs() != 1.0 {
        return Err(Error::param("phase_sign", "must be +1 or -1"));
    }
    let xs = stationary_point(lambda, alpha);
    let xu = (2.0 * xs).max(2.0);
    let xa = (std::f64::consts::PI / (lambda.abs() + 1.0)).min(1.0);
    let delta0 = 1.0 / (20.0 * xu);
    let nodes = gauss_legendre(NODES);
    let mut f = Integrand {
        lambda,
        alpha,
        sign: phase_sign,
        delta: delta0,
    };
    let panels = real_panels(&f, xa, xu)?;
    let mut j = [Complex64::new(0.0, 0.0); 3];
    for (k, jk) in j.iter_mut().enumerate() {
        f.delta = delta0 / f64::from(1u32 << k);
        *jk = damped(&f, xa, xu, &panels, &nodes);
    }
    // J_δ = J + aδ + bδ² + …, with δ, δ/2, δ/4.
    let three = (8.0 * j[2] - 6.0 * j[1] + j[0]) / 3.0;
    let two = 2.0 * j[2] - j[1];
    let residual = (three - two).norm() / three.norm();
    if !(residual <= RESIDUAL_LIMIT) {
        return Err(Error::Oscillatory(format!(
            "extrapolation residual {residual:.3e} exceeds {RESIDUAL_LIMIT} at lambda = {lambda}, alpha = {alpha}"
        )));
    }
    Ok(JValue {
        value: three,
        residual,
        panels: panels.len(),
    })
}

/// `J(λ)` with the phase `e^{iλξ} e^{-iξ^{1+α}}`.
pub fn oscillatory_j(lambda: f64, alpha: f64) -> Result<JValue> {
    oscillatory_integral(lambda, alpha, 1.0)
}

/// Largest positive `λ` whose real-axis panel layout fits in
/// [`PANEL_BUDGET`], by bisection on the panel counter (relative width 1e-3).
pub fn lambda_budget(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let fits = |lambda: f64| {
        let f = Integrand {
            lambda,
            alpha,
            sign: 1.0,
            delta: 0.0,
        };
        let xu = (2.0 * stationary_point(lambda, alpha)).max(2.0);
        let xa = (std::f64::consts::PI / (lambda + 1.0)).min(1.0);
        real_panels(&f, xa, xu).is_ok()
    };
    let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
    while fits(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi / lo > 1.001 {
        let mid = (lo * hi).sqrt();
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
