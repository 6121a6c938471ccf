//! Boundary functions on the circle, analytic functions on the disk, and the
//! operations connecting them.

mod analytic;
mod boundary;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use analytic::{AnalyticFunction, BlaschkeProduct, LacunarySeries, LogKernel, TaylorSeries, ORIGIN_FACTOR_IS_Z};
pub use boundary::{
    AnalyticBoundary, BoundaryEval, BoundaryFunction, ClosedForm, ClosedSpec, ExtensionField, FourierSeries,
    MobiusComposed, SampledGrid, Smoothness, StepFunction,
};

use crate::error::{check, Error, Result};
use crate::geometry::{ArcT, DiskPoint};
use crate::quadrature::adaptive;

/// Harmonic extension `f̂(z)`.
pub fn poisson_extension(f: &BoundaryFunction, z: DiskPoint) -> Result<Complex64> {
    let (v, ok) = f.extension_field().value_checked(z.value());
    if ok {
        Ok(v)
    } else {
        Err(Error::NotConverged { value: v.norm(), error: f64::NAN })
    }
}

/// `|∇f̂(z)|`.
pub fn poisson_gradient(f: &BoundaryFunction, z: DiskPoint) -> Result<f64> {
    let (v, ok) = f.extension_field().gradient_checked(z.value());
    if ok {
        Ok(v)
    } else {
        Err(Error::NotConverged { value: v, error: f64::NAN })
    }
}

/// Conjugate function, normalized to vanish at the origin.
pub fn harmonic_conjugate(f: &FourierSeries) -> Result<FourierSeries> {
    f.conjugate()
}

pub fn blaschke_eval(b: &BlaschkeProduct, z: DiskPoint) -> Complex64 {
    b.eval(z.value())
}

/// `M_p(r, h) = ((1/2π) ∫ |h(re^{iθ})|^p dθ)^{1/p}` by the trapezoid rule,
/// doubling the grid until two successive values agree to `1e-12`.
pub fn integral_means(h: &AnalyticFunction, p: f64, r: f64) -> Result<f64> {
    check(p > 0.0, || format!("p = {p} must be positive"))?;
    check((0.0..1.0).contains(&r), || format!("radius {r} outside [0, 1)"))?;
    let mean = |n: usize| -> f64 {
        (0..n).map(|k| h.eval(Complex64::from_polar(r, k as f64 * TAU / n as f64)).norm().powf(p)).sum::<f64>()
            / n as f64
    };
    let mut n = ((4.0 * h.bandwidth(r) * p.max(1.0)).ceil() as usize).clamp(64, 1 << 24).next_power_of_two();
    let mut prev = mean(n);
    loop {
        let next = mean(2 * n);
        if (next - prev).abs() <= 1e-12 * next.abs().max(1e-300) || next == prev {
            return Ok(next.powf(1.0 / p));
        }
        n *= 2;
        if n >= 1 << 24 {
            return Err(Error::NotConverged { value: next.powf(1.0 / p), error: (next - prev).abs() });
        }
        prev = next;
    }
}

/// Mean of `f` over the arc.
pub fn arc_average(f: &BoundaryFunction, arc: &ArcT) -> Complex64 {
    let a = arc.start();
    let len = arc.length();
    if let BoundaryFunction::Fourier(fs) = f {
        let d = fs.degree() as i64;
        let mut acc = fs.coeff(0);
        for n in (-d..=d).filter(|&n| n != 0) {
            let nf = n as f64;
            let integral = (Complex64::from_polar(1.0, nf * (a + len)) - Complex64::from_polar(1.0, nf * a))
                / Complex64::new(0.0, nf * len);
            acc += fs.coeff(n) * integral;
        }
        return acc;
    }
    let breaks = lifted_breaks(&f.breakpoints(), a, a + len);
    adaptive(|t| f.eval(t), a, a + len, &breaks, 1e-12, 20_000).value / len
}

/// Copies of the given angles shifted by multiples of 2π into `[lo, hi]`.
pub(crate) fn lifted_breaks(breaks: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for &b in breaks {
        let mut x = lo + (b - lo).rem_euclid(TAU);
        while x <= hi {
            out.push(x);
            x += TAU;
        }
    }
    out
}

/// Rademacher function `r_n(t) = r_0(2^n t)`: `+1` on `(0, ½)`, `-1` on `(½, 1)`,
/// `0` at the dyadic breakpoints.
pub fn rademacher(n: u32, t: f64) -> i8 {
    if !(0.0..=1.0).contains(&t) {
        return 0;
    }
    // doubling and dropping the integer part is exact in binary
    let mut x = t.fract();
    for _ in 0..n {
        if x == 0.0 {
            break;
        }
        x = (2.0 * x).fract();
    }
    if x == 0.0 || x == 0.5 {
        0
    } else if x < 0.5 {
        1
    } else {
        -1
    }
}

/// Monte-Carlo estimate of `∫_0^1 |Σ c_k r_k(t)|^p dt` with uniform `t`.
pub fn rademacher_moment(coeffs: &[Complex64], p: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = 0.0;
    for _ in 0..samples {
        let t: f64 = rng.gen();
        let sum: Complex64 = coeffs.iter().enumerate().map(|(k, c)| c * rademacher(k as u32, t) as f64).sum();
        acc += sum.norm().powf(p);
    }
    acc / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dp(re: f64, im: f64) -> DiskPoint {
        DiskPoint::from_re_im(re, im).unwrap()
    }

    #[test]
    fn extension_examples() {
        let f = BoundaryFunction::constant(c(7.0, 0.0));
        assert_eq!(poisson_extension(&f, dp(0.3, 0.5)).unwrap(), c(7.0, 0.0));
        let f = BoundaryFunction::Fourier(FourierSeries::cos(1));
        let z = DiskPoint::from_polar(0.7, 1.1).unwrap();
        assert_abs_diff_eq!(poisson_extension(&f, z).unwrap().re, 0.7 * 1.1f64.cos(), epsilon = 1e-15);
        let g = SampledGrid::from_fn(64, |t| c((5.0 * t).sin().exp(), t.cos())).unwrap();
        let mean: Complex64 = g.values().iter().sum::<Complex64>() / 64.0;
        let v = poisson_extension(&BoundaryFunction::Samples(g), DiskPoint::origin()).unwrap();
        assert!((v - mean).norm() < 1e-14);
    }

    #[test]
    fn gradient_examples() {
        let f = BoundaryFunction::constant(c(2.0, 1.0));
        assert_eq!(poisson_gradient(&f, dp(0.4, 0.1)).unwrap(), 0.0);
        let f = BoundaryFunction::Fourier(FourierSeries::cos(1));
        for z in [dp(0.0, 0.0), dp(0.5, -0.3), dp(-0.9, 0.1)] {
            assert_abs_diff_eq!(poisson_gradient(&f, z).unwrap(), 1.0, epsilon = 1e-15);
        }
        let f = BoundaryFunction::Fourier(FourierSeries::cos(2));
        assert_abs_diff_eq!(poisson_gradient(&f, dp(0.5, 0.0)).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn conjugate_examples() {
        let f = FourierSeries::cos(1);
        let g = harmonic_conjugate(&f).unwrap();
        assert!((0..8).all(|k| (g.eval(k as f64).re - (k as f64).sin()).abs() < 1e-15));
        let g = harmonic_conjugate(&FourierSeries::constant(c(3.0, 0.0))).unwrap();
        assert_eq!(g.coeff(0), c(0.0, 0.0));
        let f = FourierSeries::cos(1).add(&FourierSeries::cos(2));
        let g = harmonic_conjugate(&f).unwrap();
        for k in 0..8 {
            let t = k as f64 * 0.7;
            assert_abs_diff_eq!(g.eval(t).re, t.sin() + (2.0 * t).sin(), epsilon = 1e-14);
        }
        assert_eq!(harmonic_conjugate(&FourierSeries::exp(1)), Err(Error::NotReal));
    }

    #[test]
    fn means_examples() {
        let h = AnalyticFunction::constant(c(3.0, 4.0));
        assert_abs_diff_eq!(integral_means(&h, 1.5, 0.5).unwrap(), 5.0, epsilon = 1e-12);
        let h = AnalyticFunction::identity();
        assert_abs_diff_eq!(integral_means(&h, 2.0, 0.6).unwrap(), 0.6, epsilon = 1e-14);
        let cs = [1.0, 0.5, -0.25, 0.2, 0.1];
        let h = AnalyticFunction::Lacunary(LacunarySeries::from_real(&cs).unwrap());
        let r: f64 = 0.9;
        let want = cs.iter().enumerate().map(|(k, c)| c * c * r.powf(2.0 * 2f64.powi(k as i32))).sum::<f64>().sqrt();
        assert_abs_diff_eq!(integral_means(&h, 2.0, r).unwrap(), want, epsilon = 1e-12);
        assert!(integral_means(&h, 2.0, 1.0).is_err());
    }

    #[test]
    fn average_examples() {
        let arc = ArcT::new(0.0, PI).unwrap();
        let f = BoundaryFunction::Fourier(FourierSeries::cos(1));
        assert_abs_diff_eq!(arc_average(&f, &arc).re, 2.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(arc_average(&f, &ArcT::full()).norm(), 0.0, epsilon = 1e-15);
        let k = BoundaryFunction::constant(c(-2.0, 1.0));
        assert!((arc_average(&k, &arc) - c(-2.0, 1.0)).norm() < 1e-15);
        // closed-form path
        let g = BoundaryFunction::from_fn(Smoothness::Analytic, vec![], |t| c(t.cos(), 0.0));
        assert_abs_diff_eq!(arc_average(&g, &arc).re, 2.0 / PI, epsilon = 1e-12);
        // step across its jump
        let s = BoundaryFunction::sign_step();
        let arc = ArcT::new(PI / 2.0, PI / 2.0).unwrap();
        assert_abs_diff_eq!(arc_average(&s, &arc).re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rademacher_examples() {
        assert_eq!(rademacher(0, 0.25), 1);
        assert_eq!(rademacher(0, 0.5), 0);
        assert_eq!(rademacher(0, 0.0), 0);
        assert_eq!(rademacher(0, 1.0), 0);
        assert_eq!(rademacher(0, 0.75), -1);
        assert_eq!(rademacher(3, 0.3), 1);
        assert_eq!(rademacher(2, 0.125), 0);
        assert_eq!(rademacher(2, 0.2), -1);
    }

    #[test]
    fn mean_value_property() {
        let f = BoundaryFunction::Fourier(FourierSeries::real_trig(&[0.3, 1.0, 0.0, -0.5], &[0.0, 0.2, 0.7]));
        let field = f.extension_field();
        for z in [c(0.1, 0.2), c(-0.5, 0.4), c(0.7, -0.1)] {
            let rho = 0.2;
            let n = 64;
            let avg: Complex64 =
                (0..n).map(|k| field.value(z + Complex64::from_polar(rho, k as f64 * TAU / n as f64))).sum::<Complex64>()
                    / n as f64;
            assert!((avg - field.value(z)).norm() < 1e-13);
        }
        let avg = arc_average(&f, &ArcT::full());
        assert!((avg - field.value(c(0.0, 0.0))).norm() < 1e-14);
        // kernel quadrature field for a closure
        let g = BoundaryFunction::from_fn(Smoothness::Lipschitz, vec![1.0, 1.0 + PI], |t| c((t - 1.0).sin().abs(), 0.0));
        let field = g.extension_field();
        assert_eq!(field.method(), "kernel-quadrature");
        let z = c(0.3, 0.3);
        let n = 32;
        let avg: Complex64 =
            (0..n).map(|k| field.value(z + Complex64::from_polar(0.1, k as f64 * TAU / n as f64))).sum::<Complex64>()
                / n as f64;
        assert!((avg - field.value(z)).norm() < 1e-8);
    }

    #[test]
    fn boundary_reproduction_improves() {
        let f = FourierSeries::real_trig(&[0.0, 1.0, 0.3, 0.0, 0.2], &[0.0, 0.0, 0.5]);
        let mut last = f64::INFINITY;
        for r in [0.9, 0.99, 0.999] {
            let dev = (0..256)
                .map(|k| {
                    let t = k as f64 * TAU / 256.0;
                    (f.extension(Complex64::from_polar(r, t)) - f.eval(t)).norm()
                })
                .fold(0.0, f64::max);
            assert!(dev < last);
            last = dev;
        }
    }

    #[test]
    fn blaschke_modulus_on_grid() {
        let b = BlaschkeProduct::new(vec![dp(0.5, 0.0), dp(0.0, -0.9), dp(-0.7, 0.7), DiskPoint::origin()]);
        for i in 0..60 {
            for j in 0..60 {
                let z = Complex64::from_polar(i as f64 / 60.0 * 0.9999, j as f64 * TAU / 60.0);
                assert!(b.eval(z).norm() < 1.0);
            }
        }
    }

    #[test]
    fn khinchine_bracket() {
        let vecs: [Vec<Complex64>; 3] = [
            vec![c(1.0, 0.0); 8],
            (0..12).map(|k| c(0.8f64.powi(k), 0.0)).collect(),
            vec![c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.5), c(0.3, 0.0)],
        ];
        for (i, v) in vecs.iter().enumerate() {
            let l2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            for p in [1.0, 2.0, 3.0, 4.0] {
                let m = rademacher_moment(v, p, 10_000, 17 + i as u64);
                let ratio = m / l2.powf(p / 2.0);
                assert!((0.2..=5.0).contains(&ratio), "vector {i}, p {p}: {ratio}");
            }
        }
    }

    fn trig_poly() -> impl Strategy<Value = FourierSeries> {
        (proptest::collection::vec(-1.0f64..1.0, 1..6), proptest::collection::vec(-1.0f64..1.0, 1..6))
            .prop_map(|(a, b)| FourierSeries::real_trig(&a, &b))
    }

    proptest! {
        #[test]
        fn cauchy_riemann(f in trig_poly(), r in 0.0f64..0.99, t in 0.0f64..TAU) {
            let z = Complex64::from_polar(r, t);
            let h = TaylorSeries::new(f.analytic_completion().unwrap());
            prop_assert!((f.gradient_norm(z) - h.derivative(z).norm()).abs() < 1e-10);
        }

        #[test]
        fn parseval(cs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12), r in 0.0f64..0.95) {
            let coeffs: Vec<Complex64> = cs.iter().map(|&(a, b)| c(a, b)).collect();
            let want = coeffs.iter().enumerate().map(|(n, a)| a.norm_sqr() * r.powi(2 * n as i32)).sum::<f64>().sqrt();
            let got = integral_means(&AnalyticFunction::Taylor(TaylorSeries::new(coeffs)), 2.0, r).unwrap();
            prop_assert!((got - want).abs() < 1e-10);
        }

        #[test]
        fn conjugate_is_harmonic_pair(f in trig_poly(), r in 0.0f64..0.95, t in 0.0f64..TAU) {
            let g = f.conjugate().unwrap();
            let z = Complex64::from_polar(r, t);
            let h = TaylorSeries::new(f.analytic_completion().unwrap()).eval(z);
            prop_assert!((h - (f.extension(z).re + Complex64::i() * g.extension(z).re)).norm() < 1e-12);
        }
    }
}
