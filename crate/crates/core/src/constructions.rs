//! Explicit sequences and functions used as examples and counterexamples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::carleson::{blaschke_zero_measure, DiscretePointMeasure};
use crate::error::{check, Error, Result};
use crate::functions::{rademacher, AnalyticFunction, LacunarySeries, LogKernel};
use crate::geometry::{DiskPoint, PolarPoint, TangentialRegion};

/// Parameters of the tangentially accumulating Blaschke sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKc")]
pub struct KCParams {
    pub s: f64,
    pub r: f64,
    pub t: f64,
    pub eps: f64,
    pub theta: f64,
    pub count: usize,
}

#[derive(Deserialize)]
struct RawKc {
    s: f64,
    r: f64,
    t: f64,
    eps: f64,
    #[serde(default)]
    theta: f64,
    #[serde(default = "default_count")]
    count: usize,
}

fn default_count() -> usize {
    100_000
}

impl TryFrom<RawKc> for KCParams {
    type Error = Error;
    fn try_from(r: RawKc) -> Result<Self> {
        KCParams::new(r.s, r.r, r.t, r.eps, r.theta, r.count)
    }
}

impl KCParams {
    /// Requires `0 < r < s < 1`, `0 < t < 1` and `r(1-t) < ε < min{r, s(1-t)}`.
    pub fn new(s: f64, r: f64, t: f64, eps: f64, theta: f64, count: usize) -> Result<Self> {
        check(0.0 < r && r < s && s < 1.0, || format!("need 0 < r < s < 1, got r = {r}, s = {s}"))?;
        check(t > 0.0 && t < 1.0, || format!("t = {t} outside (0, 1)"))?;
        check(theta.is_finite(), || "non-finite angle".into())?;
        check(count >= 1, || "need at least one point".into())?;
        let lo = r * (1.0 - t);
        let hi = r.min(s * (1.0 - t));
        if !(lo < eps && eps < hi) {
            return Err(Error::Inadmissible(format!("ε = {eps} outside ({lo}, {hi})")));
        }
        // the deepest point must stay a normal float
        check((count as f64).ln() / eps < 700.0, || format!("depth {count}^(-1/{eps}) underflows"))?;
        Ok(KCParams { s, r, t, eps, theta, count })
    }

    /// Predicted trend slope of the sector ratio for the zero measure with exponent `γ`.
    pub fn predicted_slope(&self, gamma: f64) -> f64 {
        (gamma - self.eps) / self.t - gamma
    }
}

/// Points `z_k` with the boundary angle they accumulate at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSequence {
    pub points: Vec<PolarPoint>,
    pub accumulation_angle: f64,
}

impl PointSequence {
    /// `Σ_k (1 - |z_k|)^γ δ_{z_k}` tagged with the accumulation angle.
    pub fn zero_measure(&self, gamma: f64) -> Result<DiscretePointMeasure> {
        Ok(blaschke_zero_measure(&self.points, gamma)?.with_accumulation(self.accumulation_angle))
    }

    /// `Σ_k (1 - |z_k|)^γ`.
    pub fn depth_sum(&self, gamma: f64) -> f64 {
        self.points.iter().map(|z| z.depth.powf(gamma)).sum()
    }
}

/// `a_k = (1 - k^{-1/ε}) e^{i(θ + k^{-t/ε})}`, `k = 1..=K`. The first point is the origin.
pub fn kc_sequence(params: &KCParams) -> PointSequence {
    let (e, t) = (params.eps, params.t);
    let points = (1..=params.count)
        .map(|k| {
            let k = k as f64;
            PolarPoint::new(k.powf(-1.0 / e), params.theta + k.powf(-t / e)).expect("depth in (0, 1]")
        })
        .collect();
    PointSequence { points, accumulation_angle: crate::geometry::normalize_angle(params.theta) }
}

/// The tangential region the sequence of [`kc_sequence`] lies in: contact
/// order `1/t`, aperture `c`.
pub fn kc_region(params: &KCParams, c: f64) -> Result<TangentialRegion> {
    TangentialRegion::new(1.0 / params.t, c, params.theta)
}

/// Coefficients `2^{-(k/2)((1-s)/p₁ + (1-r)/p₂)}`, `k = 0..K-1`.
///
/// The returned message is set when `(1-s)/p₁ > (1-r)/p₂`, where the series
/// does not separate the two spaces.
pub fn lacunary_g_coefficients(p1: f64, p2: f64, s: f64, r: f64, count: usize) -> Result<(Vec<Complex64>, Option<String>)> {
    check(p1 > 1.0 && p2 > 1.0, || format!("exponents p1 = {p1}, p2 = {p2} must exceed 1"))?;
    check(s > 0.0 && s < 1.0 && r > 0.0 && r < 1.0, || format!("s = {s}, r = {r} outside (0, 1)"))?;
    let (a, b) = ((1.0 - s) / p1, (1.0 - r) / p2);
    let warning = (a > b).then(|| format!("(1-s)/p1 = {a} exceeds (1-r)/p2 = {b}"));
    let coeffs = (0..count).map(|k| Complex64::new(2f64.powf(-(k as f64) / 2.0 * (a + b)), 0.0)).collect();
    Ok((coeffs, warning))
}

pub fn lacunary_g(p1: f64, p2: f64, s: f64, r: f64, count: usize) -> Result<(LacunarySeries, Option<String>)> {
    let (c, w) = lacunary_g_coefficients(p1, p2, s, r, count)?;
    Ok((LacunarySeries::new(c)?, w))
}

/// Coefficients `2^{-k(1-s)/p₁} k^{-1/p₂}` for `k = 1..=K`, with `c_0 = 0`.
pub fn lacunary_h_coefficients(p1: f64, p2: f64, s: f64, count: usize) -> Result<Vec<Complex64>> {
    check(p1 > p2, || format!("need p1 > p2, got {p1} <= {p2}"))?;
    check(p2 > 1.0, || format!("p2 = {p2} must exceed 1"))?;
    check(s > 0.0 && s < 1.0, || format!("s = {s} outside (0, 1)"))?;
    let mut c = vec![Complex64::new(0.0, 0.0)];
    c.extend((1..=count).map(|k| {
        let k = k as f64;
        Complex64::new(2f64.powf(-k * (1.0 - s) / p1) * k.powf(-1.0 / p2), 0.0)
    }));
    Ok(c)
}

pub fn lacunary_h(p1: f64, p2: f64, s: f64, count: usize) -> Result<LacunarySeries> {
    LacunarySeries::new(lacunary_h_coefficients(p1, p2, s, count)?)
}

/// The exponent `r` with `(1-s)/p₁ = (1-r)/p₂`.
pub fn critical_r(p1: f64, p2: f64, s: f64) -> f64 {
    1.0 - p2 * (1.0 - s) / p1
}

/// `g_w(z) = log(2 / (1 - w̄z))`.
pub fn log_test_function(w: DiskPoint) -> AnalyticFunction {
    AnalyticFunction::LogKernel(LogKernel::new(w))
}

/// `z_n = (1 - n^{-1/t}) e^{iθ_n}`, `θ_n = Σ_{k<n} 1/k + 1/(2n)`, for `n = 2..=N`.
///
/// The angles wind around the circle, so no accumulation angle exists; the
/// exported angle is that of the last point.
pub fn zero_set_sequence(t: f64, n_max: usize) -> Result<PointSequence> {
    check(t > 0.0 && t < 1.0, || format!("t = {t} outside (0, 1)"))?;
    let mut harmonic = 1.0;
    let mut points = Vec::with_capacity(n_max.saturating_sub(1));
    for n in 2..=n_max {
        let nf = n as f64;
        points.push(PolarPoint::new(nf.powf(-1.0 / t), harmonic + 0.5 / nf)?);
        harmonic += 1.0 / nf;
    }
    let angle = points.last().map_or(0.0, |p| p.angle);
    Ok(PointSequence { points, accumulation_angle: angle })
}

/// `Σ_k r_k(t) a_k z^{2^k}`.
pub fn rademacher_randomization(coeffs: &[Complex64], t: f64) -> Result<LacunarySeries> {
    check((0.0..=1.0).contains(&t), || format!("t = {t} outside [0, 1]"))?;
    LacunarySeries::new(coeffs.iter().enumerate().map(|(k, a)| a * rademacher(k as u32, t) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleson::carleson_trend;
    use crate::seminorms::lacunary_qps_proxy;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn kc() -> KCParams {
        KCParams::new(0.8, 0.4, 0.5, 0.3, 0.0, 1000).unwrap()
    }

    #[test]
    fn admissibility() {
        assert!(KCParams::new(0.8, 0.4, 0.5, 0.3, 0.0, 10).is_ok());
        assert!(matches!(KCParams::new(0.8, 0.4, 0.5, 0.1, 0.0, 10), Err(Error::Inadmissible(_))));
        assert!(matches!(KCParams::new(0.8, 0.4, 0.5, 0.4, 0.0, 10), Err(Error::Inadmissible(_))));
        assert!(matches!(KCParams::new(0.5, 0.02, 0.5, 0.011, 0.0, 100_000), Err(Error::InvalidParameter(_))));
        assert!(KCParams::new(0.4, 0.8, 0.5, 0.3, 0.0, 10).is_err());
    }

    #[test]
    fn kc_points() {
        let seq = kc_sequence(&kc());
        assert_eq!(seq.points[0].depth, 1.0);
        let p = seq.points[1];
        assert_relative_eq!(p.modulus(), 1.0 - 2f64.powf(-10.0 / 3.0), max_relative = 1e-14);
        assert_relative_eq!(p.modulus(), 0.90079, max_relative = 1e-4);
        assert_relative_eq!(p.angle, 2f64.powf(-5.0 / 3.0), max_relative = 1e-14);
        assert_relative_eq!(p.angle, 0.31498, max_relative = 1e-4);
    }

    #[test]
    fn kc_points_lie_in_tangential_region() {
        let params = KCParams { count: 100_000, ..kc() };
        let seq = kc_sequence(&params);
        let region = kc_region(&params, 0.25).unwrap();
        assert!(seq.points[1..].iter().all(|z| region.contains_polar(z)));
        let last = seq.points.last().unwrap();
        assert!(last.depth < 1e-15 && last.angle < 1e-6);
    }

    #[test]
    fn kc_trend_slopes() {
        let params = KCParams { count: 100_000, ..kc() };
        let seq = kc_sequence(&params);
        let levels: Vec<usize> = (4..=13).collect();
        for gamma in [params.s, params.r] {
            let mu = seq.zero_measure(gamma).unwrap();
            let slope = carleson_trend(&mu, gamma, mu.trend_angle(), &levels).unwrap();
            let want = params.predicted_slope(gamma);
            assert!((slope - want).abs() <= 0.1 * want.abs(), "{gamma}: {slope} vs {want}");
        }
    }

    #[test]
    fn g_coefficients() {
        let (c, w) = lacunary_g_coefficients(2.0, 2.0, 0.2, 0.8, 10).unwrap();
        assert!(w.is_some());
        assert_eq!(c[0].re, 1.0);
        for (k, ck) in c.iter().enumerate() {
            assert_relative_eq!(ck.re, 2f64.powf(-(k as f64) / 4.0), max_relative = 1e-14);
        }
        let (_, w) = lacunary_g_coefficients(2.0, 2.0, 0.8, 0.2, 10).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn g_proxies_separate() {
        let (p1, p2, s, r) = (2.0, 3.0, 0.7, 0.4);
        let (c, _) = lacunary_g_coefficients(p1, p2, s, r, 40).unwrap();
        let a = lacunary_qps_proxy(&c, p1, s);
        let q = 2f64.powf((1.0 - s) / 2.0 - (p1 / 2.0) * (1.0 - r) / p2);
        assert!(!a.divergent);
        assert_relative_eq!(a.value, (1.0 - q.powi(40)) / (1.0 - q), max_relative = 1e-10);
        assert!(lacunary_qps_proxy(&c, p2, r).divergent);
    }

    #[test]
    fn h_coefficients_and_proxies() {
        let c = lacunary_h_coefficients(4.0, 2.0, 0.5, 3).unwrap();
        assert_eq!(c[0].re, 0.0);
        assert_relative_eq!(c[2].re, 2f64.powf(-0.75), max_relative = 1e-14);
        assert_relative_eq!(c[2].re, 0.5946, max_relative = 1e-4);
        assert!(lacunary_h_coefficients(2.0, 2.0, 0.5, 3).is_err());
        let (p1, p2, s) = (3.0, 2.0, 0.4);
        let r = critical_r(p1, p2, s);
        let c = lacunary_h_coefficients(p1, p2, s, 200).unwrap();
        let prox = lacunary_qps_proxy(&c, p2, r);
        for (k, t) in prox.terms.iter().enumerate().skip(1) {
            assert_relative_eq!(*t, 1.0 / k as f64, max_relative = 1e-10);
        }
        assert!(prox.divergent);
        let conv = lacunary_qps_proxy(&c, p1, s);
        assert!(!conv.divergent);
        // p-series with exponent p1/p2 = 1.5 stays below ζ(1.5)
        assert!(conv.value < 2.6124);
        assert!(lacunary_h(p1, p2, s, 60).is_err());
        assert!(lacunary_h(p1, p2, s, 20).is_ok());
    }

    #[test]
    fn log_test_function_values() {
        let g0 = log_test_function(DiskPoint::origin());
        assert_relative_eq!(g0.eval(Complex64::new(0.3, 0.4)).re, std::f64::consts::LN_2, max_relative = 1e-14);
        for w in [0.5, 0.9, 0.99] {
            let g = log_test_function(DiskPoint::from_polar(w, 1.0).unwrap());
            assert_relative_eq!(g.eval(Complex64::new(0.0, 0.0)).re, std::f64::consts::LN_2, max_relative = 1e-14);
        }
    }

    #[test]
    fn log_test_function_is_log_size_on_its_arc() {
        // a = (1 - |I|) e^{it}: Re g_a ≈ log(2/|I|) on I
        for len in [0.5, 0.1, 0.01, 0.001] {
            for t in [0.0, 2.0, 4.5] {
                let a = DiskPoint::from_polar(1.0 - len, t).unwrap();
                let g = log_test_function(a);
                for i in 0..=20 {
                    let th = t - len / 2.0 + len * i as f64 / 20.0;
                    let ratio = g.boundary_value(th).re / (2.0 / len).ln();
                    assert!((0.25..=4.0).contains(&ratio), "{len} {t} {th}: {ratio}");
                }
            }
        }
    }

    #[test]
    fn zero_set_points() {
        let seq = zero_set_sequence(0.5, 1000).unwrap();
        assert_relative_eq!(seq.points[0].modulus(), 0.75, max_relative = 1e-15);
        assert_relative_eq!(seq.points[0].angle, 1.25, max_relative = 1e-15);
        // Σ (1 - |z_n|)^t is harmonic
        let h: f64 = (2..=1000).map(|n| 1.0 / n as f64).sum();
        assert_relative_eq!(seq.depth_sum(0.5), h, max_relative = 1e-12);
    }

    #[test]
    fn randomization() {
        let a: Vec<Complex64> = (0..10).map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.5)).collect();
        let g = rademacher_randomization(&a, 1e-9).unwrap();
        assert_eq!(g.coeffs, a);
        assert!(rademacher_randomization(&a, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn randomization_preserves_magnitudes(t in 0.0f64..=1.0, seed in 0u64..100) {
            let a: Vec<Complex64> = (0..12).map(|k| Complex64::new(((k as u64 * 7 + seed) % 5) as f64 - 2.0, 1.0)).collect();
            let g = rademacher_randomization(&a, t).unwrap();
            for (x, y) in g.coeffs.iter().zip(&a) {
                let m = x.norm();
                prop_assert!(m == 0.0 || (m - y.norm()).abs() < 1e-15);
            }
            let pa = lacunary_qps_proxy(&a, 2.0, 0.5).value;
            let pg = lacunary_qps_proxy(&g.coeffs, 2.0, 0.5).value;
            prop_assert!(pg <= pa * (1.0 + 1e-15));
        }

        #[test]
        fn kc_region_and_accumulation(
            (s, r, t, eps) in (0.3f64..0.95, 0.05f64..0.9, 0.1f64..0.9, 0.0f64..1.0)
                .prop_filter_map("admissible", |(s, rf, t, u)| {
                    let r = rf * s;
                    let lo = r * (1.0 - t);
                    let hi = r.min(s * (1.0 - t));
                    (hi > lo).then(|| (s, r, t, lo + (0.05 + 0.9 * u) * (hi - lo)))
                }),
            theta in 0.0f64..6.0,
        ) {
            prop_assume!(2000f64.ln() / eps < 700.0);
            let params = KCParams::new(s, r, t, eps, theta, 2000).unwrap();
            let seq = kc_sequence(&params);
            let region = kc_region(&params, 0.25).unwrap();
            prop_assert!(seq.points[1..].iter().all(|z| region.contains_polar(z)));
            let last = seq.points.last().unwrap();
            prop_assert!(last.depth < seq.points[1].depth);
        }
    }
}
