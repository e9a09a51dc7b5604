//! Free group `U_α(t)`, Duhamel/Picard iterates and the integrating-factor
//! RK4 step.
//!
//! The equation is written `u_t = L u + N(u)` with `L̂ = iρ` and
//! `N(u) = -u u_x = -½ ∂x(u²)`, so `U_α(t)` multiplies each mode by
//! `e^{itρ(ξ, η)}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::cumulative_weights;
use crate::spectral::{abs_pow, sgn, GridSpec, SpectralField};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `ρ(ξ, η) = -(|ξ|^α ξ + sgn(ξ) η²)`.
#[inline]
pub fn dispersion_symbol(xi: f64, eta: f64, alpha: f64) -> f64 {
    -(abs_pow(xi, alpha) * xi + sgn(xi) * eta * eta)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} is outside (0, 1]")));
    }
    Ok(())
}

/// Per-mode phases `e^{itρ}` with the Nyquist lines set to 0.
fn phases(grid: &GridSpec, t: f64, alpha: f64) -> Vec<Complex64> {
    grid.modes()
        .map(|(idx, xi, eta)| {
            if grid.is_nyquist(idx) {
                ZERO
            } else {
                Complex64::from_polar(1.0, t * dispersion_symbol(xi, eta, alpha))
            }
        })
        .collect()
}

fn times(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// `U_α(t) f`.
pub fn propagate(f: &SpectralField, t: f64, alpha: f64) -> SpectralField {
    let e = phases(&f.grid, t, alpha);
    SpectralField {
        grid: f.grid,
        coeffs: times(&f.coeffs, &e),
    }
}

/// Precomputed `ξ` column and 2/3-rule mask for one grid.
#[derive(Clone, Debug)]
pub(crate) struct Nonlinearity {
    grid: GridSpec,
    /// `-½ iξ` per mode, 0 where the mask drops the mode.
    half_dx: Vec<Complex64>,
    keep: Vec<bool>,
}

impl Nonlinearity {
    pub(crate) fn new(grid: GridSpec) -> Self {
        let mut keep = vec![false; grid.len()];
        let mut half_dx = vec![ZERO; grid.len()];
        for iy in 0..grid.ny {
            let ky = grid.mode_y(iy).unsigned_abs() as usize;
            for ix in 0..grid.nx {
                let kx = grid.mode_x(ix).unsigned_abs() as usize;
                let idx = iy * grid.nx + ix;
                if 3 * kx < grid.nx && 3 * ky < grid.ny {
                    keep[idx] = true;
                    half_dx[idx] = Complex64::new(0.0, -0.5 * grid.xi(ix));
                }
            }
        }
        Self {
            grid,
            half_dx,
            keep,
        }
    }

    /// `N(u) = -½ ∂x P[(P u)²]` with `P` the 2/3 mask.
    pub(crate) fn eval(&self, u: &[Complex64]) -> Vec<Complex64> {
        let g = self.grid;
        let masked: Vec<Complex64> = u
            .iter()
            .zip(&self.keep)
            .map(|(c, &k)| if k { *c } else { ZERO })
            .collect();
        let field = SpectralField {
            grid: g,
            coeffs: masked,
        };
        let mut samples = field.to_real_unchecked();
        for v in &mut samples.samples {
            *v *= *v;
        }
        let sq = samples.forward();
        sq.coeffs.iter().zip(&self.half_dx).map(|(c, m)| c * m).collect()
    }
}

/// Integrating-factor RK4 stepper with fixed `dt`.
#[derive(Clone, Debug)]
pub struct Stepper {
    pub grid: GridSpec,
    pub alpha: f64,
    pub dt: f64,
    pub nonlinear: bool,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    nl: Nonlinearity,
}

impl Stepper {
    pub fn new(grid: GridSpec, alpha: f64, dt: f64, nonlinear: bool) -> Result<Self> {
        check_alpha(alpha)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::param("dt", format!("{dt} must be positive")));
        }
        Ok(Self {
            grid,
            alpha,
            dt,
            nonlinear,
            half: phases(&grid, 0.5 * dt, alpha),
            full: phases(&grid, dt, alpha),
            nl: Nonlinearity::new(grid),
        })
    }

    fn n(&self, u: &[Complex64]) -> Vec<Complex64> {
        if self.nonlinear {
            self.nl.eval(u)
        } else {
            vec![ZERO; u.len()]
        }
    }

    /// Advances `u` from time `t` to `t + dt`. A non-finite result is reported
    /// as [`Error::BlowUp`] at the last valid time `t`.
    pub fn step(&self, u: &SpectralField, t: f64) -> Result<SpectralField> {
        u.check_grid(&SpectralField::zeros(self.grid))?;
        let h = self.dt;
        let (e, e2) = (&self.half, &self.full);
        let u0 = &u.coeffs;

        let k1 = self.n(u0);
        let a: Vec<Complex64> = (0..u0.len()).map(|i| e[i] * (u0[i] + 0.5 * h * k1[i])).collect();
        let k2 = self.n(&a);
        let b: Vec<Complex64> = (0..u0.len()).map(|i| e[i] * u0[i] + 0.5 * h * k2[i]).collect();
        let k3 = self.n(&b);
        let c: Vec<Complex64> = (0..u0.len()).map(|i| e2[i] * u0[i] + h * e[i] * k3[i]).collect();
        let k4 = self.n(&c);
        let coeffs: Vec<Complex64> = (0..u0.len())
            .map(|i| {
                e2[i] * u0[i] + h / 6.0 * (e2[i] * k1[i] + 2.0 * e[i] * (k2[i] + k3[i]) + k4[i])
            })
            .collect();
        let out = SpectralField {
            grid: self.grid,
            coeffs,
        };
        if !out.is_finite() {
            return Err(Error::BlowUp { t });
        }
        Ok(out)
    }
}

/// One nonlinear integrating-factor RK4 step of size `dt`.
pub fn step_if_rk4(u: &SpectralField, dt: f64, alpha: f64) -> Result<SpectralField> {
    Stepper::new(u.grid, alpha, dt, true)?.step(u, 0.0)
}

/// `-u u_x` evaluated pseudospectrally with 2/3 dealiasing.
pub fn nonlinear_term(u: &SpectralField) -> SpectralField {
    SpectralField {
        grid: u.grid,
        coeffs: Nonlinearity::new(u.grid).eval(&u.coeffs),
    }
}

/// `k`-th Picard iterate of the Duhamel map at time `t`:
/// `u^k(t) = U(t)φ - ∫_0^t U(t - t') (u^{k-1} u^{k-1}_x)(t') dt'`, `u^0 = U(t)φ`.
///
/// The time integral uses [`cumulative_weights`] on `quad_steps` panels.
pub fn picard_iterate(
    phi: &SpectralField,
    k: usize,
    t: f64,
    alpha: f64,
    quad_steps: usize,
) -> Result<SpectralField> {
    check_alpha(alpha)?;
    if k == 0 {
        return Ok(propagate(phi, t, alpha));
    }
    let h = t / quad_steps as f64;
    let weights = cumulative_weights(quad_steps, h)?;
    let nodes: Vec<f64> = (0..=quad_steps).map(|m| m as f64 * h).collect();
    let nl = Nonlinearity::new(phi.grid);

    let mut level: Vec<SpectralField> = nodes.iter().map(|&s| propagate(phi, s, alpha)).collect();
    for _ in 0..k {
        // G_m = U(-t_m) N(u(t_m)); then u(t_m) = U(t_m)[φ + ∫_0^{t_m} G].
        let g: Vec<Vec<Complex64>> = level
            .iter()
            .zip(&nodes)
            .map(|(u, &s)| {
                let n = SpectralField {
                    grid: phi.grid,
                    coeffs: nl.eval(&u.coeffs),
                };
                propagate(&n, -s, alpha).coeffs
            })
            .collect();
        level = nodes
            .iter()
            .enumerate()
            .map(|(m, &s)| {
                let mut acc = phi.coeffs.clone();
                for (i, w) in weights[m].iter().enumerate() {
                    for (a, gi) in acc.iter_mut().zip(&g[i]) {
                        *a += w * gi;
                    }
                }
                propagate(
                    &SpectralField {
                        grid: phi.grid,
                        coeffs: acc,
                    },
                    s,
                    alpha,
                )
            })
            .collect();
    }
    Ok(level.pop().expect("at least two nodes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gaussian_bump, smooth_random};
    use proptest::prelude::*;

    #[test]
    fn symbol_values() {
        assert_eq!(dispersion_symbol(1.0, 0.0, 1.0), -1.0);
        assert_eq!(dispersion_symbol(0.0, 3.0, 0.5), 0.0);
        let v = dispersion_symbol(-2.0, 1.0, 0.5);
        assert!((v - (2.0 * 2f64.sqrt() + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn linear_step_is_exact_propagation() {
        let g = GridSpec::square_2pi(32).unwrap();
        let u = smooth_random(g, 4, 4.0);
        let s = Stepper::new(g, 0.7, 0.05, false).unwrap();
        let a = s.step(&u, 0.0).unwrap();
        let b = propagate(&u, 0.05, 0.7);
        assert!(a.sub(&b).unwrap().max_abs() <= 1e-13 * u.max_abs());
    }

    #[test]
    fn mean_preserved_by_step() {
        let g = GridSpec::new(32, 32, 10.0, 10.0).unwrap();
        let u = gaussian_bump(g, 1.0, (5.0, 5.0), (1.0, 1.0)).forward();
        let v = step_if_rk4(&u, 0.01, 0.5).unwrap();
        assert!((u.mean_integral() - v.mean_integral()).abs() < 1e-13 * u.mean_integral().abs());
    }

    #[test]
    fn blow_up_reports_time() {
        let g = GridSpec::square_2pi(8).unwrap();
        let mut u = SpectralField::zeros(g);
        u.coeffs[1] = Complex64::new(f64::NAN, 0.0);
        let s = Stepper::new(g, 1.0, 0.1, true).unwrap();
        assert!(matches!(s.step(&u, 2.5), Err(Error::BlowUp { t }) if t == 2.5));
    }

    #[test]
    fn picard_rejects_odd_panels() {
        let g = GridSpec::square_2pi(8).unwrap();
        let u = smooth_random(g, 1, 1.0);
        assert!(picard_iterate(&u, 1, 0.1, 1.0, 3).is_err());
        let zero = SpectralField::zeros(g);
        assert_eq!(picard_iterate(&zero, 2, 0.3, 0.5, 4).unwrap().max_abs(), 0.0);
        let p0 = picard_iterate(&u, 0, 0.3, 0.5, 4).unwrap();
        assert_eq!(p0, propagate(&u, 0.3, 0.5));
    }

    /// Single cosine mode `φ = cos(x)` on a `2π` box: the first iterate's
    /// Duhamel part lives on modes `(±2, 0)` with amplitude
    /// `-(coef) (e^{itψ} - 1)/(iψ)` in the interaction representation.
    #[test]
    fn picard_single_mode_matches_closed_form() {
        let alpha = 0.5;
        let t = 0.4;
        let g = GridSpec::square_2pi(16).unwrap();
        let phi = gaussian_free_cos(g);
        let u1 = picard_iterate(&phi, 1, t, alpha, 64).unwrap();
        let lin = propagate(&phi, t, alpha);
        let duh = u1.sub(&lin).unwrap();
        // û(±1, 0) = c. u u_x has ĝ(2) = (2π/area) · c² · i·1 (pairs (1,1): c·(i·1)c),
        // and -u u_x with U(-t') gives ∫ e^{it'ψ}, ψ = 2ρ(1) - ρ(2).
        let c = phi.coeffs[g.index_of_mode(1, 0).unwrap()];
        let rho = |x: f64| dispersion_symbol(x, 0.0, alpha);
        let psi = 2.0 * rho(1.0) - rho(2.0);
        let w = 2.0 * std::f64::consts::PI / g.area();
        let kernel = ((Complex64::new(0.0, t * psi)).exp() - 1.0) / Complex64::new(0.0, psi);
        let g2 = -w * c * c * Complex64::new(0.0, 1.0);
        let want = Complex64::from_polar(1.0, t * rho(2.0)) * g2 * kernel;
        let got = duh.coeffs[g.index_of_mode(2, 0).unwrap()];
        assert!((got - want).norm() < 1e-8 * want.norm(), "{got} vs {want}");
        // Mode 0 receives nothing: ∂x kills it.
        assert!(duh.coeffs[0].norm() < 1e-14);
    }

    fn gaussian_free_cos(g: GridSpec) -> SpectralField {
        crate::spectral::RealField::from_fn(g, |x, _| x.cos()).forward()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn unitary_and_group_law(seed in 0u64..1000, t1 in -3.0f64..3.0, t2 in -3.0f64..3.0, alpha in 0.05f64..1.0) {
            let g = GridSpec::new(32, 16, 9.0, 4.0).unwrap();
            let u = smooth_random(g, seed, 3.0);
            let a = propagate(&u, t1, alpha);
            prop_assert!((a.l2() - u.l2()).abs() < 1e-12 * u.l2());
            let b = propagate(&a, t2, alpha);
            let c = propagate(&u, t1 + t2, alpha);
            prop_assert!(b.sub(&c).unwrap().l2() < 1e-12 * u.l2());
            let back = propagate(&a, -t1, alpha);
            prop_assert!(back.sub(&u).unwrap().l2() < 1e-12 * u.l2());
            prop_assert!(a.to_real().is_ok());
        }
    }
}
