//! Dispersive estimates for the free group: pointwise `|t|^{-1}` decay,
//! Strichartz mixed norms, the derivative-gain `L²_T L^∞` bound and the refined
//! `L¹_T L^∞` bound for forced linear solutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagator::{check_alpha, propagate};
use crate::quadrature::{cumulative_weights, trapezoid};
use crate::report::{ConstantMode, NormReport, Verdict};
use crate::spectral::{
    apply_dx_alpha, apply_dy_delta, dx, dy, s_alpha, sobolev_norm, GridSpec, SobolevIndex, SpectralField,
};
use crate::synth::modulated_gaussian;

/// Fewest time samples accepted for a mixed `L^q_T` norm.
pub const MIN_TIME_SAMPLES: usize = 64;

/// Low-frequency energy fraction above which decay data are rejected.
pub const LOW_XI_TOLERANCE: f64 = 1e-6;

/// Lowest admissible `|ξ|`, in units of the lattice spacing.
pub const XI_MIN_MODES: f64 = 4.0;

/// Coefficients below this fraction of the peak are ignored when bounding
/// group velocities.
const SIGNIFICANT: f64 = 1e-3;

/// `(q, p)` with `1/q + 1/p = 1/2`, `q > 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub q: f64,
    pub p: f64,
}

impl AdmissiblePair {
    pub fn new(q: f64, p: f64) -> Result<Self> {
        if q == 2.0 && p == f64::INFINITY {
            return Err(Error::param("q", "(2, inf) is not an admissible pair"));
        }
        if !(q > 2.0 && p >= 2.0) {
            return Err(Error::param("q", format!("({q}, {p}) needs q > 2 and p >= 2")));
        }
        let gap = 1.0 / q + 1.0 / p - 0.5;
        if gap.abs() > 1e-12 {
            return Err(Error::param("p", format!("1/q + 1/p = {} is not 1/2", 0.5 + gap)));
        }
        Ok(Self { q, p })
    }

    /// The pair with the given `q`, `p = 2q/(q - 2)`.
    pub fn from_q(q: f64) -> Result<Self> {
        let p = if q == f64::INFINITY { 2.0 } else { 2.0 * q / (q - 2.0) };
        Self::new(q, p)
    }

    /// `D_x` order `(α - 1)/(2q)` on the left of the Strichartz estimate.
    pub fn gain(&self, alpha: f64) -> f64 {
        (alpha - 1.0) / (2.0 * self.q)
    }
}

pub fn zero_x_mean(phi: &SpectralField) -> Result<()> {
    let peak = phi.max_abs();
    let worst = phi
        .grid
        .modes()
        .filter(|&(_, xi, _)| xi == 0.0)
        .map(|(idx, _, _)| phi.coeffs[idx].norm())
        .fold(0.0, f64::max);
    if worst > 1e-12 * peak {
        return Err(Error::Precondition(format!(
            "data must have zero x-mean (|û(0, η)| up to {worst:.3e})"
        )));
    }
    Ok(())
}

/// Fraction of `L²` energy carried by `|ξ| < ξ_min`, `ξ_min = 4·2π/lx`.
pub fn low_xi_fraction(phi: &SpectralField) -> f64 {
    let xi_min = XI_MIN_MODES * phi.grid.dxi();
    let total: f64 = phi.coeffs.iter().map(|c| c.norm_sqr()).sum();
    let low: f64 = phi
        .grid
        .modes()
        .filter(|&(_, xi, _)| xi.abs() < xi_min)
        .map(|(idx, _, _)| phi.coeffs[idx].norm_sqr())
        .sum();
    if total > 0.0 {
        low / total
    } else {
        0.0
    }
}

/// Time for the fastest significant mode to cross the box:
/// `min(lx / max v_x, ly / max v_y)` with `v_x = (1+α)|ξ|^α`, `v_y = 2|η|`.
pub fn box_traversal_time(phi: &SpectralField, alpha: f64) -> f64 {
    let cut = SIGNIFICANT * phi.max_abs();
    let (mut vx, mut vy) = (0.0_f64, 0.0_f64);
    for (idx, xi, eta) in phi.grid.modes() {
        if phi.coeffs[idx].norm() >= cut {
            vx = vx.max((1.0 + alpha) * xi.abs().powf(alpha));
            vy = vy.max(2.0 * eta.abs());
        }
    }
    let tx = if vx > 0.0 { phi.grid.lx / vx } else { f64::INFINITY };
    let ty = if vy > 0.0 { phi.grid.ly / vy } else { f64::INFINITY };
    tx.min(ty)
}

/// `|t| ‖D_x^{(α-1)/2} U_α(t) φ‖_{L^∞} / ‖φ‖_{L¹}`.
pub fn decay_ratio(phi: &SpectralField, t: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if t == 0.0 || !t.is_finite() {
        return Err(Error::param("t", format!("{t} must be finite and nonzero")));
    }
    let low = low_xi_fraction(phi);
    if low > LOW_XI_TOLERANCE {
        return Err(Error::Precondition(format!(
            "{low:.3e} of the energy sits below |xi| = {} (4 lattice frequencies); \
             the order {} multiplier is singular at xi = 0",
            XI_MIN_MODES * phi.grid.dxi(),
            0.5 * (alpha - 1.0)
        )));
    }
    let l1 = phi.to_real()?.l1();
    let g = apply_dx_alpha(&propagate(phi, t, alpha), 0.5 * (alpha - 1.0))?;
    Ok(t.abs() * g.to_real_unchecked().linf() / l1)
}

/// Wave-packet data and box for the decay sweep at order `α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySetup {
    pub grid: GridSpec,
    pub k0: f64,
    pub width: (f64, f64),
}

impl DecaySetup {
    /// Presets keep the packet in the dispersive regime from `t = 0.5` on:
    /// the `x` spreading time `w_x² k0^{1-α} / (α(1+α))` is below 1, and the
    /// box holds `t_box/2` well above 0.5.
    pub fn for_alpha(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let (k0, width, (nx, ny), (lx, ly)) = if alpha <= 0.375 {
            (25.0, (0.15, 0.5), (2048, 1024), (64.0, 256.0))
        } else if alpha <= 0.75 {
            (12.0, (0.3, 0.5), (2048, 1024), (128.0, 256.0))
        } else {
            (8.0, (0.5, 0.5), (1024, 512), (256.0, 128.0))
        };
        Ok(Self {
            grid: GridSpec::new(nx, ny, lx, ly)?,
            k0,
            width,
        })
    }

    pub fn data(&self) -> SpectralField {
        let g = self.grid;
        modulated_gaussian(g, 1.0, self.k0, (0.5 * g.lx, 0.5 * g.ly), self.width).forward()
    }
}

/// Decay ratio on a geometric time grid over `[0.5, t_box/2]`; PASS iff
/// `max/min < 3`.
pub fn decay_sweep(phi: &SpectralField, alpha: f64, samples: usize) -> Result<NormReport> {
    if samples < 2 {
        return Err(Error::param("samples", "need at least two times"));
    }
    let t_box = box_traversal_time(phi, alpha);
    let (t0, t1) = (0.5, 0.5 * t_box);
    if !(t1 > t0) {
        return Err(Error::Precondition(format!(
            "box traversal time {t_box:.3} leaves no window above t = 0.5; enlarge the box"
        )));
    }
    let mut rep = NormReport::new("decay", &["t", "ratio"]);
    rep.param("alpha", alpha).param("grid", phi.grid).param("t_box", t_box);
    rep.constant_mode = ConstantMode::Fitted;
    let mut ratios = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = t0 * (t1 / t0).powf(i as f64 / (samples - 1) as f64);
        let r = decay_ratio(phi, t, alpha)?;
        ratios.push(r);
        rep.push_row(vec![t, r]);
    }
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.fit("C", hi);
    rep.verdict(Verdict::below("max_over_min", hi / lo, 3.0));
    Ok(rep)
}

fn time_nodes(t0: f64, t1: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < MIN_TIME_SAMPLES {
        return Err(Error::param(
            "time_samples",
            format!("{samples} < {MIN_TIME_SAMPLES}"),
        ));
    }
    if !(t1 > t0) {
        return Err(Error::param("T", format!("window [{t0}, {t1}] is empty")));
    }
    Ok((0..samples)
        .map(|i| t0 + (t1 - t0) * i as f64 / (samples - 1) as f64)
        .collect())
}

/// `‖g(t)‖` values combined into `L^q_T` (trapezoid; `q = ∞` takes the max).
fn lq_time(t: &[f64], values: &[f64], q: f64) -> f64 {
    if q == f64::INFINITY {
        return values.iter().cloned().fold(0.0, f64::max);
    }
    let powered: Vec<f64> = values.iter().map(|v| v.powf(q)).collect();
    trapezoid(t, &powered).powf(1.0 / q)
}

/// `‖D_x^{(α-1)/(2q)} U_α(t) φ‖_{L^q_t L^p_{xy}}` over `t ∈ [t0, t1]`.
pub fn strichartz_lhs(
    phi: &SpectralField,
    pair: AdmissiblePair,
    alpha: f64,
    window: (f64, f64),
    samples: usize,
) -> Result<f64> {
    check_alpha(alpha)?;
    let t = time_nodes(window.0, window.1, samples)?;
    let g = apply_dx_alpha(phi, pair.gain(alpha))?;
    let norms: Vec<f64> = t
        .iter()
        .map(|&s| propagate(&g, s, alpha).to_real_unchecked().lp(pair.p))
        .collect();
    Ok(lq_time(&t, &norms, pair.q))
}

/// Strichartz left side over `[0, T]` divided by `‖φ‖_{L²}`.
pub fn strichartz_ratio(
    phi: &SpectralField,
    pair: AdmissiblePair,
    alpha: f64,
    t_end: f64,
    samples: usize,
) -> Result<f64> {
    zero_x_mean(phi)?;
    let den = phi.l2();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(strichartz_lhs(phi, pair, alpha, (0.0, t_end), samples)? / den)
}

/// Pair used for the derivative-gain `L²_T L^∞` bound: `p = 4/δ` (so `δ > 2/p`), hence
/// `q = 4/(2 - δ)` and `k̃ = (q - 2)/(2q) = δ/4`.
pub fn cor33_exponent(delta: f64) -> Result<(AdmissiblePair, f64)> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::param("delta", format!("{delta} must lie in (0, 2)")));
    }
    let pair = AdmissiblePair::from_q(4.0 / (2.0 - delta))?;
    Ok((pair, (pair.q - 2.0) / (2.0 * pair.q)))
}

/// `‖U_α(t)φ‖_{L²_T L^∞}` over
/// `T^{k̃}(‖φ‖ + ‖D_x^{(1-α)/4+δ}φ‖ + ‖D_y^δ φ‖ + ‖D_x^{(1-α)/4} D_y^δ φ‖)`.
pub fn cor33_ratio(phi: &SpectralField, alpha: f64, t_end: f64, delta: f64, samples: usize) -> Result<f64> {
    check_alpha(alpha)?;
    zero_x_mean(phi)?;
    let (_, k_tilde) = cor33_exponent(delta)?;
    let t = time_nodes(0.0, t_end, samples)?;
    let sups: Vec<f64> = t
        .iter()
        .map(|&s| propagate(phi, s, alpha).to_real_unchecked().linf())
        .collect();
    let lhs = lq_time(&t, &sups, 2.0);
    let a = 0.25 * (1.0 - alpha);
    let rhs = phi.l2()
        + apply_dx_alpha(phi, a + delta)?.l2()
        + apply_dy_delta(phi, delta)?.l2()
        + apply_dx_alpha(&apply_dy_delta(phi, delta)?, a)?.l2();
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / (t_end.powf(k_tilde) * rhs))
}

/// Left and right sides of the forced-solution bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinedStrichartz {
    /// `‖∂x w‖_{L¹_T L^∞}`.
    pub lhs_x: f64,
    /// `‖∂y w‖_{L¹_T L^∞}`.
    pub lhs_y: f64,
    /// `T^{k_δ}(‖w‖_{L^∞_T H^{s_α+2δ}} + ∫_0^T ‖F‖_{H^{s_α-1+2δ}})`.
    pub rhs: f64,
    pub ratio_x: f64,
    pub ratio_y: f64,
}

/// Solves `w_t + D_x^α w_x + H w_yy = F` exactly in each mode,
/// `w(t) = U(t)[w0 + ∫_0^t U(-t')F(t') dt']`, and compares both
/// `L¹_T L^∞` derivative norms with the right side, `k_δ = 1/2 + δ/4`.
///
/// `samples - 1` must be even (cumulative Simpson weights).
pub fn refined_strichartz_check(
    w0: &SpectralField,
    forcing: &(dyn Fn(f64) -> SpectralField + Sync),
    alpha: f64,
    t_end: f64,
    delta: f64,
    samples: usize,
) -> Result<NormReport> {
    check_alpha(alpha)?;
    let (_, k_tilde) = cor33_exponent(delta)?;
    let k_delta = 0.5 + k_tilde;
    let t = time_nodes(0.0, t_end, samples)?;
    let n = samples - 1;
    let weights = cumulative_weights(n, t_end / n as f64)?;
    let forces: Vec<SpectralField> = t.iter().map(|&s| forcing(s)).collect();
    for f in &forces {
        w0.check_grid(f)?;
    }
    let pulled: Vec<SpectralField> = forces.iter().zip(&t).map(|(f, &s)| propagate(f, -s, alpha)).collect();

    let hs_w = SobolevIndex::new(s_alpha(alpha) + 2.0 * delta);
    let hs_f = SobolevIndex::new(s_alpha(alpha) - 1.0 + 2.0 * delta);
    let mut rep = NormReport::new("refined", &["t", "dx_inf", "dy_inf", "w_hs", "f_hs"]);
    rep.param("alpha", alpha).param("T", t_end).param("delta", delta).param("k_delta", k_delta);
    rep.constant_mode = ConstantMode::Fitted;
    let (mut dxs, mut dys, mut fs) = (Vec::new(), Vec::new(), Vec::new());
    let mut w_sup: f64 = 0.0;
    for (m, &s) in t.iter().enumerate() {
        let mut acc = w0.clone();
        for (i, wi) in weights[m].iter().enumerate() {
            acc = acc.axpy(*wi, &pulled[i])?;
        }
        let w = propagate(&acc, s, alpha);
        let (a, b) = (dx(&w).to_real_unchecked().linf(), dy(&w).to_real_unchecked().linf());
        let (wn, fnorm) = (sobolev_norm(&w, &hs_w), sobolev_norm(&forces[m], &hs_f));
        w_sup = w_sup.max(wn);
        dxs.push(a);
        dys.push(b);
        fs.push(fnorm);
        rep.push_row(vec![s, a, b, wn, fnorm]);
    }
    let lhs_x = trapezoid(&t, &dxs);
    let lhs_y = trapezoid(&t, &dys);
    let rhs = t_end.powf(k_delta) * (w_sup + trapezoid(&t, &fs));
    let ratio = |l: f64| if rhs > 0.0 { l / rhs } else { 0.0 };
    let out = RefinedStrichartz {
        lhs_x,
        lhs_y,
        rhs,
        ratio_x: ratio(lhs_x),
        ratio_y: ratio(lhs_y),
    };
    rep.fit("lhs_x", out.lhs_x);
    rep.fit("lhs_y", out.lhs_y);
    rep.fit("rhs", out.rhs);
    rep.fit("ratio_x", out.ratio_x);
    rep.fit("ratio_y", out.ratio_y);
    rep.verdict(Verdict::new(
        "ratios_finite",
        "finite",
        out.ratio_x.max(out.ratio_y),
        out.ratio_x.is_finite() && out.ratio_y.is_finite(),
    ));
    Ok(rep)
}

/// The fitted constants of a [`refined_strichartz_check`] report.
pub fn refined_summary(rep: &NormReport) -> RefinedStrichartz {
    let g = |k: &str| rep.fitted.get(k).copied().unwrap_or(f64::NAN);
    RefinedStrichartz {
        lhs_x: g("lhs_x"),
        lhs_y: g("lhs_y"),
        rhs: g("rhs"),
        ratio_x: g("ratio_x"),
        ratio_y: g("ratio_y"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::smooth_random_off_axis;

    fn data(seed: u64) -> SpectralField {
        smooth_random_off_axis(GridSpec::square_2pi(32).unwrap(), seed, 3.0, 1.0)
    }

    #[test]
    fn pairs() {
        assert!(AdmissiblePair::new(4.0, 4.0).is_ok());
        let msg = AdmissiblePair::new(2.0, f64::INFINITY).unwrap_err().to_string();
        assert!(msg.contains("not an admissible pair"));
        assert!(AdmissiblePair::new(4.0, 3.0).is_err());
        let p = AdmissiblePair::from_q(f64::INFINITY).unwrap();
        assert_eq!(p.p, 2.0);
        let (pair, k) = cor33_exponent(0.1).unwrap();
        assert!((pair.p - 40.0).abs() < 1e-9 && (k - 0.025).abs() < 1e-12);
    }

    #[test]
    fn strichartz_is_homogeneous_and_time_translation_invariant() {
        let phi = data(1);
        let pair = AdmissiblePair::new(4.0, 4.0).unwrap();
        let a = strichartz_ratio(&phi, pair, 0.5, 1.0, 65).unwrap();
        let b = strichartz_ratio(&phi.scaled(2.0), pair, 0.5, 1.0, 65).unwrap();
        assert!((a - b).abs() < 1e-13 * a);
        let t0 = 0.7;
        let shifted = propagate(&phi, t0, 0.5);
        let c = strichartz_lhs(&shifted, pair, 0.5, (0.0, 1.0), 65).unwrap();
        let d = strichartz_lhs(&phi, pair, 0.5, (t0, t0 + 1.0), 65).unwrap();
        assert!((c - d).abs() < 1e-10 * c, "{c} {d}");
        assert!(strichartz_ratio(&phi, pair, 0.5, 1.0, 10).is_err());
    }

    #[test]
    fn strichartz_energy_pair_is_unitary_at_alpha_one() {
        let phi = data(2);
        let pair = AdmissiblePair::from_q(f64::INFINITY).unwrap();
        let r = strichartz_ratio(&phi, pair, 1.0, 1.0, 64).unwrap();
        assert!((r - 1.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn x_mean_is_required() {
        let g = GridSpec::square_2pi(16).unwrap();
        let phi = crate::synth::smooth_random(g, 3, 2.0);
        let pair = AdmissiblePair::new(4.0, 4.0).unwrap();
        assert!(matches!(strichartz_ratio(&phi, pair, 0.5, 1.0, 64), Err(Error::Precondition(_))));
        assert!(decay_ratio(&phi, 1.0, 0.5).is_err());
    }

    #[test]
    fn cor33_homogeneous_and_shrira_case() {
        let phi = data(4);
        let a = cor33_ratio(&phi, 1.0, 1.0, 0.1, 64).unwrap();
        let b = cor33_ratio(&phi.scaled(3.0), 1.0, 1.0, 0.1, 64).unwrap();
        assert!(a > 0.0 && a.is_finite());
        assert!((a - b).abs() < 1e-13 * a);
    }

    #[test]
    fn refined_forcing_linearity() {
        let g = GridSpec::square_2pi(32).unwrap();
        let zero = SpectralField::zeros(g);
        let prof = data(5);
        let f1 = |t: f64| prof.scaled(t.cos());
        let f2 = |t: f64| prof.scaled(2.0 * t.cos());
        let a = refined_summary(&refined_strichartz_check(&zero, &f1, 0.5, 1.0, 0.1, 65).unwrap());
        let b = refined_summary(&refined_strichartz_check(&zero, &f2, 0.5, 1.0, 0.1, 65).unwrap());
        assert!((b.lhs_x / a.lhs_x - 2.0).abs() < 1e-12);
        assert!((a.ratio_x - b.ratio_x).abs() < 1e-12 * a.ratio_x);
        // F = 0: the forced solution is the free one.
        let none = |_: f64| SpectralField::zeros(g);
        let c = refined_summary(&refined_strichartz_check(&prof, &none, 0.5, 1.0, 0.1, 65).unwrap());
        assert!(c.ratio_x.is_finite() && c.ratio_x > 0.0);
    }

    /// Duhamel with a constant-in-time forcing against the closed form
    /// `w = (e^{itρ} - 1)/(iρ) F̂` mode by mode.
    #[test]
    fn forced_solution_matches_closed_form() {
        let g = GridSpec::square_2pi(16).unwrap();
        let prof = data(6).resample(g);
        let force = |_: f64| prof.clone();
        let t_end = 0.1;
        let rep = refined_strichartz_check(&SpectralField::zeros(g), &force, 0.5, t_end, 0.1, 65).unwrap();
        let exact = prof.map_modes(|xi, eta, c| {
            let rho = crate::propagator::dispersion_symbol(xi, eta, 0.5);
            if rho == 0.0 {
                c * t_end
            } else {
                c * (num_complex::Complex64::from_polar(1.0, rho * t_end) - 1.0) / num_complex::Complex64::new(0.0, rho)
            }
        });
        let last = rep.rows.last().unwrap();
        let expect = dx(&exact).to_real_unchecked().linf();
        assert!((last[1] - expect).abs() < 1e-6 * expect, "{} {expect}", last[1]);
    }

    #[test]
    fn decay_setup_is_admissible() {
        for alpha in [0.25, 0.5, 1.0] {
            let s = DecaySetup::for_alpha(alpha).unwrap();
            let phi = s.data();
            assert!(low_xi_fraction(&phi) < LOW_XI_TOLERANCE);
            assert!(box_traversal_time(&phi, alpha) > 4.0);
        }
    }
}
