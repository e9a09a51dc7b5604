//! Smooth radial dyadic decomposition.
//!
//! Block `k = 0` is the low-pass `χ(|(ξ, η)|)`; block `k ≥ 1` is
//! `φ(|(ξ, η)| / 2^k)` with `φ(r) = χ(r) - χ(2r)`. Blocks are indexed by `k`
//! and stand for the dyadic frequency `λ = 2^k`, so `Δ_1` is block 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{apply_real, dx, grad_inf, padded_product, GridSpec, SobolevIndex, SpectralField};

/// `g(x) = e^{-1/x}` for `x > 0`, else 0.
#[inline]
fn g(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, `C^∞` in between.
#[inline]
pub fn smoothstep(x: f64) -> f64 {
    let a = g(x);
    let b = g(1.0 - x);
    a / (a + b)
}

/// Low-pass profile: 1 on `r ≤ 1`, 0 on `r ≥ 2`.
#[inline]
pub fn chi(r: f64) -> f64 {
    smoothstep(2.0 - r)
}

/// Annular profile supported in `1/2 < r < 2`.
#[inline]
pub fn phi(r: f64) -> f64 {
    chi(r) - chi(2.0 * r)
}

/// Radial symbol of block `k` at radius `r`.
#[inline]
pub fn block_symbol(k: u32, r: f64) -> f64 {
    if k == 0 {
        chi(r)
    } else {
        phi(r / f64::from(k).exp2())
    }
}

/// Symbol of the enlarged block `Δ̃_{2^k}`: blocks `k-1..=k+1` (`0..=1` for `k = 0`).
pub fn tilde_symbol(k: u32, r: f64) -> f64 {
    let lo = k.saturating_sub(1);
    (lo..=k + 1).map(|j| block_symbol(j, r)).sum()
}

/// Number of blocks that can be nonzero on `grid`: block `k ≥ 1` touches
/// radii in `(2^{k-1}, 2^{k+1})`.
pub fn num_blocks(grid: &GridSpec) -> u32 {
    let rmax = grid.max_radius();
    let mut k = 1;
    while f64::from(k - 1).exp2() < rmax {
        k += 1;
    }
    k
}

/// `Q_k u`.
pub fn dyadic_project(u: &SpectralField, k: u32) -> SpectralField {
    apply_real(u, |xi, eta| block_symbol(k, xi.hypot(eta)))
}

/// `Δ̃_λ u` for `λ = 2^k`.
pub fn tilde_project(u: &SpectralField, k: u32) -> SpectralField {
    apply_real(u, |xi, eta| tilde_symbol(k, xi.hypot(eta)))
}

/// `max |χ + Σ_{k≥1} φ(·/2^k) - 1|` over the lattice (Nyquist lines included).
pub fn partition_residual(grid: &GridSpec) -> f64 {
    let kmax = num_blocks(grid);
    grid.modes()
        .map(|(_, xi, eta)| {
            let r = xi.hypot(eta);
            let sum: f64 = (0..kmax).map(|k| block_symbol(k, r)).sum();
            (sum - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Result of [`lp_commutator`].
#[derive(Clone, Debug)]
pub struct Commutator {
    pub field: SpectralField,
    pub norm: f64,
    pub ratio: f64,
}

/// `[Δ_λ, v ∂x] w = Δ_λ(v ∂x w) - v ∂x(Δ_λ w)` for `λ = 2^k`, with the ratio
/// `‖·‖_{L²} / (‖∇v‖_{L^∞} ‖w‖_{L²})` (0 when `∇v = 0`).
pub fn lp_commutator(k: u32, v: &SpectralField, w: &SpectralField) -> Result<Commutator> {
    let a = dyadic_project(&padded_product(v, &dx(w))?, k);
    let b = padded_product(v, &dx(&dyadic_project(w, k)))?;
    let field = a.sub(&b)?;
    let norm = field.l2();
    let denom = grad_inf(v) * w.l2();
    let ratio = if denom > 0.0 { norm / denom } else { 0.0 };
    Ok(Commutator { field, norm, ratio })
}

/// Dyadic weights `w_λ = μ_i^{1/2} λ^s`, `λ = 2^i`, with levels
/// `μ_i = 2^{k/2}` on `N_{k-1} ≤ i < N_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    pub s: f64,
    /// `N_0 = 0 < N_1 < … < N_K`.
    pub breakpoints: Vec<usize>,
    pub mu: Vec<f64>,
    pub weights: Vec<f64>,
    /// Uniform bound on `Σ_i μ_i a_i^n` implied by the tail conditions.
    pub bound: f64,
}

impl WeightSequence {
    /// `w_λ = λ^s` (all levels equal to 1), for `i = 0..=i_max`.
    pub fn pure_power(s: f64, i_max: usize) -> Self {
        let mut weights = vec![1.0];
        let two_s = s.exp2();
        for i in 0..i_max {
            let next = weights[i] * two_s;
            weights.push(next);
        }
        Self {
            s,
            breakpoints: vec![0],
            mu: vec![1.0; i_max + 1],
            weights,
            bound: f64::INFINITY,
        }
    }

    /// `2^s w_i ≤ w_{i+1} ≤ 2^{s+1} w_i` for every consecutive pair.
    pub fn doubling_invariant_holds(&self) -> bool {
        let two_s = self.s.exp2();
        self.weights
            .windows(2)
            .all(|w| w[0] * two_s <= w[1] && w[0] * two_s * 2.0 >= w[1])
    }

    /// `w_i / 2^{is}` is nondecreasing.
    pub fn ratio_nondecreasing(&self) -> bool {
        let r: Vec<f64> = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, w)| w / (i as f64 * self.s).exp2())
            .collect();
        r.windows(2).all(|p| p[1] >= p[0] * (1.0 - 1e-15))
    }

    /// `Σ_i μ_i a_i` for one sequence.
    pub fn weighted_sum(&self, a: &[f64]) -> f64 {
        a.iter()
            .enumerate()
            .map(|(i, v)| self.mu_at(i) * v)
            .sum()
    }

    /// `μ_i`, extended past the constructed range by the last level.
    pub fn mu_at(&self, i: usize) -> f64 {
        *self.mu.get(i).unwrap_or_else(|| self.mu.last().expect("non-empty"))
    }
}

/// Builds the weights from a family of nonnegative sequences `a^n_i`
/// (`i = 0, 1, …`), choosing each breakpoint `N_k` as the smallest index
/// beyond `N_{k-1}` with `sup_n Σ_{j ≥ N_k} a^n_j < 2^{-k}`. Levels are added
/// while `N_k ≤ i_max`; weights cover `i = 0..=i_max`.
pub fn construct_weights(a: &[Vec<f64>], s: &SobolevIndex, i_max: usize) -> Result<WeightSequence> {
    if a.is_empty() {
        return Err(Error::WeightConstruction {
            k: 0,
            reason: "empty family".into(),
        });
    }
    for (n, seq) in a.iter().enumerate() {
        if let Some(v) = seq.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::WeightConstruction {
                k: 0,
                reason: format!("sequence {n} has entry {v}; entries must be finite and nonnegative"),
            });
        }
    }
    let len = a.iter().map(Vec::len).max().unwrap_or(0);
    // sup_tail[i] = sup_n Σ_{j ≥ i} a^n_j
    let mut sup_tail = vec![0.0_f64; len + 1];
    for seq in a {
        let mut acc = 0.0;
        for i in (0..seq.len()).rev() {
            acc += seq[i];
            sup_tail[i] = sup_tail[i].max(acc);
        }
    }
    let tail = |i: usize| sup_tail.get(i).copied().unwrap_or(0.0);

    let mut breakpoints = vec![0usize];
    let mut k = 1usize;
    loop {
        let target = (-(k as f64)).exp2();
        let start = breakpoints[k - 1] + 1;
        let nk = (start..=i_max).find(|&i| tail(i) < target);
        match nk {
            Some(i) => breakpoints.push(i),
            None => break,
        }
        k += 1;
    }
    let levels = breakpoints.len() - 1;
    if levels == 0 {
        return Err(Error::WeightConstruction {
            k: 1,
            reason: format!(
                "no index in 1..={i_max} has sup tail below 2^-1 (sup tail at {i_max} is {:.3e})",
                tail(i_max)
            ),
        });
    }

    let mut mu = Vec::with_capacity(i_max + 1);
    let mut level = 1usize;
    for i in 0..=i_max {
        while level <= levels && i >= breakpoints[level] {
            level += 1;
        }
        mu.push((level as f64 / 2.0).exp2());
    }

    // Recursive form keeps the doubling invariant exact in floating point.
    let two_s = s.s.exp2();
    let quarter = 0.25_f64.exp2();
    let mut weights = vec![mu[0].sqrt()];
    for i in 0..i_max {
        let step = if mu[i + 1] > mu[i] { quarter } else { 1.0 };
        weights.push(weights[i] * two_s * step);
    }

    let mut bound = 0.5_f64.exp2() * tail(0);
    for k in 1..=levels {
        bound += ((k + 1) as f64 / 2.0).exp2() * (-(k as f64)).exp2();
    }
    Ok(WeightSequence {
        s: s.s,
        breakpoints,
        mu,
        weights,
        bound,
    })
}

/// `Σ_i w_i² ‖Q_i u‖²_{L²}`.
pub fn weighted_lp_functional(u: &SpectralField, w: &WeightSequence) -> Result<f64> {
    let blocks = num_blocks(&u.grid) as usize;
    if blocks > w.weights.len() {
        return Err(Error::param(
            "weights",
            format!(
                "{} weights cannot cover the {blocks} active blocks of {}",
                w.weights.len(),
                u.grid
            ),
        ));
    }
    Ok((0..blocks)
        .map(|i| w.weights[i].powi(2) * dyadic_project(u, i as u32).l2_squared())
        .sum())
}

/// `‖Q_i u‖²_{L²}` for every active block.
pub fn block_energies(u: &SpectralField) -> Vec<f64> {
    (0..num_blocks(&u.grid))
        .map(|i| dyadic_project(u, i).l2_squared())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{RealField, SobolevIndex};
    use crate::synth::smooth_random;
    use proptest::prelude::*;

    #[test]
    fn profile_supports() {
        assert_eq!(chi(0.3), 1.0);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(phi(0.5), 0.0);
        assert_eq!(phi(2.0), 0.0);
        assert!(phi(1.0) > 0.99);
        assert!(smoothstep(0.5) == 0.5);
    }

    #[test]
    fn radius_three_splits_between_blocks_one_and_two() {
        let w1 = block_symbol(1, 3.0);
        let w2 = block_symbol(2, 3.0);
        assert_eq!(w1, chi(1.5));
        assert!((w1 + w2 - 1.0).abs() < 1e-15);
        for k in [0, 3, 4] {
            assert_eq!(block_symbol(k, 3.0), 0.0);
        }
        let g = GridSpec::square_2pi(16).unwrap();
        // ξ = 3 on a 2π box is mode j = 3.
        let u = RealField::from_fn(g, |x, _| (3.0 * x).cos()).forward();
        let sum = dyadic_project(&u, 1).add(&dyadic_project(&u, 2)).unwrap();
        assert!(sum.sub(&u).unwrap().max_abs() < 1e-14);
        assert!(dyadic_project(&u, 0).max_abs() < 1e-14);
    }

    #[test]
    fn weights_from_geometric_sequence() {
        let a = vec![(0..30).map(|i| 0.25_f64.powi(i)).collect::<Vec<_>>()];
        let w = construct_weights(&a, &SobolevIndex::new(1.5), 20).unwrap();
        // Direct tail-sum oracle at every chosen breakpoint.
        for (k, &nk) in w.breakpoints.iter().enumerate().skip(1) {
            let tail: f64 = a[0][nk..].iter().sum();
            assert!(tail < (-(k as f64)).exp2(), "k = {k}");
            let before: f64 = a[0][nk - 1..].iter().sum();
            assert!(nk == w.breakpoints[k - 1] + 1 || before >= (-(k as f64)).exp2());
        }
        assert!(w.breakpoints.windows(2).all(|p| p[0] < p[1]));
        assert!(w.doubling_invariant_holds());
        assert!(w.ratio_nondecreasing());
        assert!(w.weighted_sum(&a[0]) <= w.bound);
        // μ level after the k-th breakpoint is 2^{(k+1)/2}.
        let last = *w.breakpoints.last().unwrap();
        let levels = w.breakpoints.len() - 1;
        assert_eq!(w.mu[last], ((levels + 1) as f64 / 2.0).exp2());
    }

    #[test]
    fn weights_reject_bad_families() {
        let s = SobolevIndex::new(1.0);
        assert!(matches!(
            construct_weights(&[vec![1.0, -0.1]], &s, 4),
            Err(Error::WeightConstruction { k: 0, .. })
        ));
        // Tail never drops below 1/2 inside the range.
        let heavy = vec![vec![1.0; 10]];
        assert!(matches!(
            construct_weights(&heavy, &s, 5),
            Err(Error::WeightConstruction { k: 1, .. })
        ));
    }

    #[test]
    fn single_block_functional() {
        let g = GridSpec::square_2pi(32).unwrap();
        // r = 1 sits on the plateau of block 0 and outside every other block.
        let u = RealField::from_fn(g, |x, _| x.cos()).forward();
        let w = WeightSequence::pure_power(2.0, 8);
        let f = weighted_lp_functional(&u, &w).unwrap();
        assert!((f - u.l2_squared() * w.weights[0].powi(2)).abs() < 1e-12 * f);
        assert_eq!(weighted_lp_functional(&SpectralField::zeros(g), &w).unwrap(), 0.0);
    }

    #[test]
    fn commutator_vanishes_for_constant_coefficient() {
        let g = GridSpec::square_2pi(32).unwrap();
        let v = RealField::from_fn(g, |_, _| 2.0).forward();
        let w = smooth_random(g, 3, 5.0);
        for k in 0..5 {
            let c = lp_commutator(k, &v, &w).unwrap();
            assert!(c.norm < 1e-12 * w.l2());
            assert_eq!(c.ratio, 0.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn reconstruction_and_near_orthogonality(seed in 0u64..500) {
            let g = GridSpec::new(64, 32, 12.0, 7.0).unwrap();
            let u = smooth_random(g, seed, 6.0);
            let kmax = num_blocks(&g);
            let mut sum = SpectralField::zeros(g);
            let mut energy = 0.0;
            for k in 0..kmax {
                let q = dyadic_project(&u, k);
                energy += q.l2_squared();
                sum = sum.add(&q).unwrap();
                let t = tilde_project(&u, k);
                prop_assert!(dyadic_project(&t, k).sub(&q).unwrap().l2() <= 1e-12 * u.l2());
                if k + 2 < kmax {
                    let qq = dyadic_project(&dyadic_project(&u, k + 2), k);
                    prop_assert!(qq.l2() <= 1e-12 * u.l2());
                }
            }
            prop_assert!(sum.sub(&u).unwrap().l2() <= 1e-12 * u.l2());
            let l2 = u.l2_squared();
            // At most two adjacent symbols overlap and they sum to 1, so the block
            // energies lie between half and all of the total.
            prop_assert!(energy <= l2 * (1.0 + 1e-12) && energy >= 0.5 * l2 * (1.0 - 1e-12));
        }
    }
}
