//! Real periodic functions on `[0, L)` held by Fourier-series coefficients
//! `c_k` (`u(x) = Σ c_k e^{i ξ_k x}`, `ξ_k = 2πk/L`).

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::spectral::{abs_pow, fft::plan_1d};
use crate::synth::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub length: f64,
    pub coeffs: Vec<Complex64>,
}

fn check_len(n: usize) -> Result<()> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::InvalidGrid(format!("line size {n} must be a power of two >= 4")));
    }
    Ok(())
}

impl Line {
    pub fn from_samples(length: f64, samples: &[f64]) -> Result<Self> {
        check_len(samples.len())?;
        let n = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        plan_1d(n, false).process(&mut buf);
        let scale = 1.0 / n as f64;
        let mut out = Self {
            length,
            coeffs: buf.into_iter().map(|c| c * scale).collect(),
        };
        out.coeffs[n / 2] = Complex64::new(0.0, 0.0);
        Ok(out)
    }

    pub fn from_fn(n: usize, length: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_len(n)?;
        let samples: Vec<f64> = (0..n).map(|i| f(length * i as f64 / n as f64)).collect();
        Self::from_samples(length, &samples)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn xi(&self, i: usize) -> f64 {
        let n = self.n() as i64;
        let k = if (i as i64) < n / 2 { i as i64 } else { i as i64 - n };
        2.0 * std::f64::consts::PI * k as f64 / self.length
    }

    pub fn samples(&self) -> Vec<f64> {
        let n = self.n();
        let mut buf = self.coeffs.clone();
        plan_1d(n, true).process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    pub fn linf(&self) -> f64 {
        self.samples().into_iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖u‖²_{L²} = L Σ |c_k|²`.
    pub fn l2(&self) -> f64 {
        (self.length * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `D^σ`, symbol `|ξ|^σ`.
    pub fn apply_d(&self, sigma: f64) -> Self {
        let coeffs = (0..self.n()).map(|i| self.coeffs[i] * abs_pow(self.xi(i), sigma)).collect();
        Self {
            length: self.length,
            coeffs,
        }
    }

    /// Same function on `n` points (coefficient copy, Nyquist dropped).
    pub fn resample(&self, n: usize) -> Result<Self> {
        check_len(n)?;
        let (m, out_n) = (self.n(), n);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); out_n];
        let half = (m.min(out_n) / 2) as i64;
        for k in -(half - 1)..half {
            let src = k.rem_euclid(m as i64) as usize;
            let dst = k.rem_euclid(out_n as i64) as usize;
            coeffs[dst] = self.coeffs[src];
        }
        Ok(Self {
            length: self.length,
            coeffs,
        })
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            length: self.length,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// Alias-free product: both factors on a 2x grid, multiplied, truncated.
    pub fn padded_product(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() || self.length != other.length {
            return Err(Error::InvalidGrid("line operands differ in size or length".into()));
        }
        let fine = 2 * self.n();
        let (a, b) = (self.resample(fine)?.samples(), other.resample(fine)?.samples());
        let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Self::from_samples(self.length, &prod)?.resample(self.n())
    }
}

/// Smooth zero-mean random line with Gaussian envelope of width `k_width`,
/// unit `L²` norm.
pub fn random_line(n: usize, length: f64, seed: u64, k_width: f64) -> Result<Line> {
    check_len(n)?;
    let mut r = rng(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    let proto = Line {
        length,
        coeffs: coeffs.clone(),
    };
    for k in 1..n / 2 {
        let xi = proto.xi(k);
        let env = (-(xi * xi) / (2.0 * k_width * k_width)).exp();
        let c = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * env;
        coeffs[k] = c;
        coeffs[n - k] = c.conj();
    }
    let line = Line { length, coeffs };
    let norm = line.l2();
    Ok(line.scaled(1.0 / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cosine_round_trip_and_norms() {
        let u = Line::from_fn(64, 2.0 * PI, |x| (3.0 * x).cos()).unwrap();
        assert!((u.coeffs[3].re - 0.5).abs() < 1e-14 && (u.coeffs[61].re - 0.5).abs() < 1e-14);
        assert!((u.l2() - PI.sqrt()).abs() < 1e-13);
        assert!((u.linf() - 1.0).abs() < 1e-13);
        let d = u.apply_d(0.5);
        assert!((d.l2() - 3f64.sqrt() * PI.sqrt()).abs() < 1e-12);
        let s = u.samples();
        assert!((s[5] - (3.0 * 2.0 * PI * 5.0 / 64.0).cos()).abs() < 1e-14);
    }

    #[test]
    fn padded_product_of_cosines() {
        let a = Line::from_fn(32, 2.0 * PI, |x| (5.0 * x).cos()).unwrap();
        let b = Line::from_fn(32, 2.0 * PI, |x| (7.0 * x).cos()).unwrap();
        let p = a.padded_product(&b).unwrap();
        let exact = Line::from_fn(32, 2.0 * PI, |x| 0.5 * (12.0 * x).cos() + 0.5 * (2.0 * x).cos()).unwrap();
        for (x, y) in p.coeffs.iter().zip(&exact.coeffs) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!(Line::from_fn(12, 1.0, |x| x).is_err());
    }

    #[test]
    fn random_lines_are_real_and_zero_mean() {
        let u = random_line(128, 2.0 * PI, 9, 6.0).unwrap();
        assert_eq!(u.mean(), 0.0);
        assert!((u.l2() - 1.0).abs() < 1e-12);
        let v = u.resample(256).unwrap();
        assert!((v.l2() - 1.0).abs() < 1e-12);
    }
}
