use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiskPoint;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncated power series `Σ a_n z^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorSeries {
    pub coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        TaylorSeries { coeffs }
    }

    /// `z ↦ z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = ONE;
        TaylorSeries { coeffs }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for (n, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + c * n as f64;
        }
        acc
    }
}

/// Series `Σ_k c_k z^{2^k}`, `k = 0..K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunarySeries {
    pub coeffs: Vec<Complex64>,
}

impl LacunarySeries {
    pub const MAX_TERMS: usize = 53;

    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() > Self::MAX_TERMS {
            return Err(Error::InvalidParameter(format!(
                "lacunary series limited to {} terms (frequency 2^52)",
                Self::MAX_TERMS
            )));
        }
        Ok(LacunarySeries { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| ONE * c).collect())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut pow = z;
        let mut acc = ZERO;
        for c in &self.coeffs {
            acc += c * pow;
            pow = pow * pow;
        }
        acc
    }

    /// `Σ c_k 2^k z^{2^k - 1}`, using `z^{2^k - 1} = Π_{j<k} z^{2^j}`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let mut prod = ONE;
        let mut pow = z;
        let mut acc = ZERO;
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += c * prod * 2f64.powi(k as i32);
            prod *= pow;
            pow = pow * pow;
        }
        acc
    }

    /// Boundary value via the angle `2^k θ mod 2π`, avoiding repeated squaring drift.
    pub fn boundary_value(&self, theta: f64) -> Complex64 {
        let mut acc = ZERO;
        let mut t = theta.rem_euclid(std::f64::consts::TAU);
        for c in &self.coeffs {
            acc += c * Complex64::from_polar(1.0, t);
            t = (2.0 * t).rem_euclid(std::f64::consts::TAU);
        }
        acc
    }

    pub fn max_frequency(&self) -> u64 {
        if self.coeffs.is_empty() {
            0
        } else {
            1u64 << (self.coeffs.len() - 1)
        }
    }
}

/// Finite Blaschke product `Π (|a|/a)(a - z)/(1 - āz)`, with factor `z` for a zero at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    zeros: Vec<DiskPoint>,
    /// `Σ (1 - |a_k|)` of zeros dropped when truncating an infinite sequence.
    #[serde(default)]
    pub truncated_mass: f64,
}

/// Convention for a zero at the origin: factor `z` rather than the limit `-z`.
pub const ORIGIN_FACTOR_IS_Z: bool = true;

impl BlaschkeProduct {
    pub fn new(zeros: Vec<DiskPoint>) -> Self {
        BlaschkeProduct { zeros, truncated_mass: 0.0 }
    }

    pub fn with_truncation(zeros: Vec<DiskPoint>, truncated_mass: f64) -> Self {
        BlaschkeProduct { zeros, truncated_mass }
    }

    pub fn zeros(&self) -> &[DiskPoint] {
        &self.zeros
    }

    /// One factor and its derivative.
    fn factor(a: Complex64, z: Complex64) -> (Complex64, Complex64) {
        if a == ZERO {
            return (z, ONE);
        }
        let u = a.unscale(a.norm()).conj(); // |a|/a
        let den = ONE - a.conj() * z;
        let b = u * (a - z) / den;
        let db = u * (a.norm_sqr() - 1.0) / (den * den);
        (b, db)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(ONE, |acc, a| acc * Self::factor(a.value(), z).0)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let (mut p, mut dp) = (ONE, ZERO);
        for a in &self.zeros {
            let (b, db) = Self::factor(a.value(), z);
            dp = dp * b + p * db;
            p *= b;
        }
        dp
    }

    /// `1 - |B(z)|²` by the telescoping sum `Σ_k (1 - |b_k|²) Π_{j<k} |b_j|²`.
    pub fn one_minus_modulus_sq(&self, z: Complex64) -> f64 {
        let mut prod = 1.0;
        let mut acc = 0.0;
        for a in &self.zeros {
            let a = a.value();
            let q = (1.0 - a.norm_sqr()) * (1.0 - z.norm_sqr()) / (ONE - a.conj() * z).norm_sqr();
            acc += q * prod;
            prod *= 1.0 - q;
        }
        acc
    }
}

/// `g_w(z) = log(2 / (1 - w̄z))`, principal branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogKernel {
    w: DiskPoint,
}

impl LogKernel {
    pub fn new(w: DiskPoint) -> Self {
        LogKernel { w }
    }

    pub fn w(&self) -> DiskPoint {
        self.w
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        // Re(1 - w̄z) > 0, so log(2/u) = ln 2 - Log u on the principal branch
        Complex64::new(LN_2, 0.0) - (ONE - self.w.value().conj() * z).ln()
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let wb = self.w.value().conj();
        wb / (ONE - wb * z)
    }

    /// Taylor coefficients `log 2, w̄, w̄²/2, ..., w̄^n/n`.
    pub fn taylor(&self, n: usize) -> TaylorSeries {
        let wb = self.w.value().conj();
        let mut coeffs = vec![Complex64::new(LN_2, 0.0)];
        let mut pow = ONE;
        for k in 1..=n {
            pow *= wb;
            coeffs.push(pow / k as f64);
        }
        TaylorSeries::new(coeffs)
    }
}

/// An analytic function on the unit disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticFunction {
    Taylor(TaylorSeries),
    Lacunary(LacunarySeries),
    Blaschke(BlaschkeProduct),
    LogKernel(LogKernel),
}

impl AnalyticFunction {
    pub fn identity() -> Self {
        AnalyticFunction::Taylor(TaylorSeries::monomial(1))
    }

    pub fn constant(c: Complex64) -> Self {
        AnalyticFunction::Taylor(TaylorSeries::new(vec![c]))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            AnalyticFunction::Taylor(t) => t.eval(z),
            AnalyticFunction::Lacunary(l) => l.eval(z),
            AnalyticFunction::Blaschke(b) => b.eval(z),
            AnalyticFunction::LogKernel(g) => g.eval(z),
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match self {
            AnalyticFunction::Taylor(t) => t.derivative(z),
            AnalyticFunction::Lacunary(l) => l.derivative(z),
            AnalyticFunction::Blaschke(b) => b.derivative(z),
            AnalyticFunction::LogKernel(g) => g.derivative(z),
        }
    }

    pub fn boundary_value(&self, theta: f64) -> Complex64 {
        match self {
            AnalyticFunction::Lacunary(l) => l.boundary_value(theta),
            _ => self.eval(Complex64::from_polar(1.0, theta)),
        }
    }

    /// Angles near which the function varies rapidly close to the circle.
    pub fn feature_angles(&self) -> Vec<f64> {
        match self {
            AnalyticFunction::Blaschke(b) if b.zeros.len() <= 64 => {
                b.zeros.iter().filter(|a| a.norm() > 0.5).map(|a| a.arg()).collect()
            }
            AnalyticFunction::LogKernel(g) if g.w.norm() > 0.0 => vec![g.w.arg()],
            _ => Vec::new(),
        }
    }

    /// Rough angular bandwidth on the circle of radius `r`, for choosing grids.
    pub(crate) fn bandwidth(&self, r: f64) -> f64 {
        match self {
            AnalyticFunction::Taylor(t) => t.coeffs.len() as f64,
            AnalyticFunction::Lacunary(l) => l.max_frequency() as f64,
            AnalyticFunction::Blaschke(b) => b
                .zeros
                .iter()
                .map(|a| 1.0 / (1.0 - a.norm() * r).max(1e-12))
                .fold(1.0, f64::max)
                * 4.0,
            AnalyticFunction::LogKernel(g) => 4.0 / (1.0 - g.w.norm() * r).max(1e-12),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dp(re: f64, im: f64) -> DiskPoint {
        DiskPoint::from_re_im(re, im).unwrap()
    }

    fn numeric_derivative(h: &AnalyticFunction, z: Complex64) -> Complex64 {
        let e = 1e-6;
        (h.eval(z + e) - h.eval(z - e)) / (2.0 * e)
    }

    #[test]
    fn derivatives_match_differences() {
        let fs = [
            AnalyticFunction::Taylor(TaylorSeries::new(vec![c(1.0, 0.0), c(0.5, -1.0), c(0.0, 0.3), c(2.0, 0.0)])),
            AnalyticFunction::Lacunary(LacunarySeries::from_real(&[1.0, 0.5, 0.25, 0.125]).unwrap()),
            AnalyticFunction::Blaschke(BlaschkeProduct::new(vec![dp(0.5, 0.0), dp(0.0, 0.5), dp(0.0, 0.0)])),
            AnalyticFunction::LogKernel(LogKernel::new(dp(0.6, 0.3))),
        ];
        for h in &fs {
            for z in [c(0.0, 0.0), c(0.3, 0.4), c(-0.7, 0.1)] {
                let d = h.derivative(z);
                assert!((d - numeric_derivative(h, z)).norm() < 1e-7 * d.norm().max(1.0), "{h:?} at {z}");
            }
        }
    }

    #[test]
    fn blaschke_examples() {
        let a = dp(0.3, 0.6);
        let b = BlaschkeProduct::new(vec![a]);
        assert!(b.eval(a.value()).norm() < 1e-15);
        let b = BlaschkeProduct::new(vec![dp(0.5, 0.0)]);
        assert_abs_diff_eq!(b.eval(ZERO).re, 0.5, epsilon = 1e-15);
        // two zeros at z = 0.9, factor by factor
        let b = BlaschkeProduct::new(vec![dp(0.5, 0.0), dp(0.0, 0.5)]);
        let z = c(0.9, 0.0);
        let f1 = (c(0.5, 0.0) - z) / (c(1.0, 0.0) - 0.5 * z);
        let f2 = c(0.0, -1.0) * (c(0.0, 0.5) - z) / (c(1.0, 0.0) - c(0.0, -0.5) * z);
        assert!((b.eval(z) - f1 * f2).norm() < 1e-15);
        // origin factor is z
        let b = BlaschkeProduct::new(vec![DiskPoint::origin()]);
        assert_eq!(b.eval(c(0.3, 0.1)), c(0.3, 0.1));
    }

    #[test]
    fn blaschke_stable_defect() {
        let b = BlaschkeProduct::new(vec![dp(0.5, 0.0), dp(0.0, 0.9), dp(-0.3, -0.2)]);
        for z in [c(0.1, 0.2), c(0.8, -0.5), c(0.0, 0.0)] {
            assert_abs_diff_eq!(b.one_minus_modulus_sq(z), 1.0 - b.eval(z).norm_sqr(), epsilon = 1e-14);
        }
        let near = Complex64::from_polar(1.0 - 1e-12, 0.7);
        let d = b.one_minus_modulus_sq(near);
        assert!(d > 0.0 && d < 1e-10);
    }

    #[test]
    fn log_kernel_taylor_agrees() {
        let g = LogKernel::new(dp(0.5, -0.2));
        let t = g.taylor(200);
        for z in [c(0.0, 0.0), c(0.4, 0.3), c(-0.6, 0.5)] {
            assert!((g.eval(z) - t.eval(z)).norm() < 1e-12);
        }
        assert_abs_diff_eq!(g.eval(ZERO).re, LN_2, epsilon = 1e-15);
        let g0 = LogKernel::new(DiskPoint::origin());
        assert_abs_diff_eq!(g0.eval(c(0.7, 0.2)).re, LN_2, epsilon = 1e-15);
    }

    #[test]
    fn lacunary_boundary_consistent() {
        let l = LacunarySeries::from_real(&[1.0, -0.5, 0.25, 0.1, 0.05]).unwrap();
        for k in 0..10 {
            let t = k as f64 * 0.61;
            assert!((l.boundary_value(t) - l.eval(Complex64::from_polar(1.0, t))).norm() < 1e-13);
        }
        assert_eq!(l.max_frequency(), 16);
        assert!(LacunarySeries::new(vec![ONE; 60]).is_err());
    }
}
