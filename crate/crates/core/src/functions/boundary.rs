use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::analytic::{AnalyticFunction, BlaschkeProduct, LogKernel};
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, DiskPoint, MobiusMap};
use crate::quadrature::adaptive;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Regularity class declared by a closed-form evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Analytic,
    Smooth,
    Lipschitz,
    PiecewiseConstant,
    Bounded,
}

/// Trigonometric polynomial `Σ_{n=-N}^{N} c_n e^{inθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    /// `coeffs[k]` is the coefficient of frequency `k - N`; the length must be odd.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::InvalidParameter("Fourier coefficient list must have odd length 2N+1".into()));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite Fourier coefficient".into()));
        }
        Ok(FourierSeries { coeffs })
    }

    /// Build from `(frequency, coefficient)` pairs; repeated frequencies add.
    pub fn from_terms(terms: &[(i64, Complex64)]) -> Self {
        let n = terms.iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![ZERO; 2 * n + 1];
        for &(k, c) in terms {
            coeffs[(k + n as i64) as usize] += c;
        }
        FourierSeries { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        FourierSeries { coeffs: vec![c] }
    }

    pub fn exp(n: i64) -> Self {
        Self::from_terms(&[(n, ONE)])
    }

    pub fn cos(n: i64) -> Self {
        Self::from_terms(&[(n, ONE * 0.5), (-n, ONE * 0.5)])
    }

    pub fn sin(n: i64) -> Self {
        let h = Complex64::new(0.0, 0.5);
        Self::from_terms(&[(n, -h), (-n, h)])
    }

    /// Real polynomial `a_0 + Σ a_n cos nθ + b_n sin nθ`; `cos[0]` is the constant.
    pub fn real_trig(cos: &[f64], sin: &[f64]) -> Self {
        let mut terms = vec![(0, ONE * cos.first().copied().unwrap_or(0.0))];
        for (n, &a) in cos.iter().enumerate().skip(1) {
            terms.push((n as i64, ONE * (a / 2.0)));
            terms.push((-(n as i64), ONE * (a / 2.0)));
        }
        for (n, &b) in sin.iter().enumerate().skip(1) {
            terms.push((n as i64, Complex64::new(0.0, -b / 2.0)));
            terms.push((-(n as i64), Complex64::new(0.0, b / 2.0)));
        }
        Self::from_terms(&terms)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        let d = self.degree() as i64;
        if n.abs() > d {
            ZERO
        } else {
            self.coeffs[(n + d) as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let w = Complex64::from_polar(1.0, theta);
        let mut acc = ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * w + c;
        }
        acc * Complex64::from_polar(1.0, -(self.degree() as f64) * theta)
    }

    /// Analytic parts `A(z) = Σ_{n≥0} c_n z^n`, `B(z) = Σ_{n≥1} conj(c_{-n}) z^n`
    /// and their derivatives; the extension is `A + conj(B)`.
    fn parts(&self, z: Complex64) -> [Complex64; 4] {
        let d = self.degree() as i64;
        let (mut a, mut da, mut b, mut db) = (ZERO, ZERO, ZERO, ZERO);
        for n in (0..=d).rev() {
            da = da * z + a;
            a = a * z + self.coeff(n);
        }
        for n in (1..=d).rev() {
            db = db * z + b;
            b = b * z + self.coeff(-n).conj();
        }
        // B has no constant term: shift once
        db = db * z + b;
        b *= z;
        [a, da, b, db]
    }

    pub fn extension(&self, z: Complex64) -> Complex64 {
        let [a, _, b, _] = self.parts(z);
        a + b.conj()
    }

    pub fn gradient_norm(&self, z: Complex64) -> f64 {
        let [_, da, _, db] = self.parts(z);
        (2.0 * (da.norm_sqr() + db.norm_sqr())).sqrt()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        let d = self.degree() as i64;
        (0..=d).all(|n| (self.coeff(-n) - self.coeff(n).conj()).norm() <= tol * scale)
    }

    /// Conjugate function normalized to vanish at the origin: `c_n ↦ -i sgn(n) c_n`.
    pub fn conjugate(&self) -> Result<FourierSeries> {
        if !self.is_real(1e-12) {
            return Err(Error::NotReal);
        }
        let d = self.degree() as i64;
        let coeffs = (-d..=d)
            .map(|n| self.coeff(n) * Complex64::new(0.0, -(n.signum() as f64)))
            .collect();
        Ok(FourierSeries { coeffs })
    }

    /// Taylor coefficients of `f̂ + i·conjugate` for real `f`: `c_0, 2c_1, 2c_2, ...`.
    pub fn analytic_completion(&self) -> Result<Vec<Complex64>> {
        if !self.is_real(1e-12) {
            return Err(Error::NotReal);
        }
        let d = self.degree() as i64;
        Ok((0..=d).map(|n| if n == 0 { self.coeff(0) } else { self.coeff(n) * 2.0 }).collect())
    }

    /// Coefficients of `|f|²`.
    pub fn abs_sq(&self) -> FourierSeries {
        let d = self.degree() as i64;
        let coeffs = (-2 * d..=2 * d)
            .map(|m| {
                let mut acc = ZERO;
                for n in (-d).max(m - d)..=d.min(m + d) {
                    acc += self.coeff(n) * self.coeff(n - m).conj();
                }
                acc
            })
            .collect();
        FourierSeries { coeffs }
    }

    /// `θ ↦ f(θ - φ)`.
    pub fn rotated(&self, phi: f64) -> FourierSeries {
        let d = self.degree() as i64;
        let coeffs = (-d..=d).map(|n| self.coeff(n) * Complex64::from_polar(1.0, -(n as f64) * phi)).collect();
        FourierSeries { coeffs }
    }

    pub fn scaled(&self, k: Complex64) -> FourierSeries {
        FourierSeries { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn conj(&self) -> FourierSeries {
        FourierSeries { coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect() }
    }

    pub fn add(&self, other: &FourierSeries) -> FourierSeries {
        let d = self.degree().max(other.degree()) as i64;
        FourierSeries { coeffs: (-d..=d).map(|n| self.coeff(n) + other.coeff(n)).collect() }
    }
}

/// Values at the `M` uniform angles `2πk/M`, read as a piecewise-constant
/// function (each sample owns the cell of half-width `π/M` around its angle).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    values: Vec<Complex64>,
}

impl SampledGrid {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        let m = values.len();
        if m < 16 || !m.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("sample count {m} must be a power of two >= 16")));
        }
        if values.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidParameter("non-finite sample".into()));
        }
        Ok(SampledGrid { values })
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        SampledGrid::new((0..m).map(|k| f(k as f64 * TAU / m as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let m = self.values.len();
        let k = (normalize_angle(theta) * m as f64 / TAU).round() as usize % m;
        self.values[k]
    }

    pub fn cell_edges(&self) -> Vec<f64> {
        let m = self.values.len();
        (0..m).map(|k| (k as f64 + 0.5) * TAU / m as f64).collect()
    }

    /// Trigonometric interpolant through the samples (Nyquist term split evenly).
    pub fn to_fourier(&self) -> FourierSeries {
        let m = self.values.len();
        let mut buf = self.values.clone();
        FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
        let half = m / 2;
        let mut coeffs = vec![ZERO; m + 1];
        let scale = 1.0 / m as f64;
        // index n + half holds frequency n
        for n in 0..half {
            coeffs[n + half] = buf[n] * scale;
        }
        for n in 1..half {
            coeffs[half - n] = buf[m - n] * scale;
        }
        coeffs[0] = buf[half] * (scale / 2.0);
        coeffs[m] = buf[half] * (scale / 2.0);
        FourierSeries { coeffs }
    }
}

/// Contract for closed-form boundary functions.
pub trait BoundaryEval: Send + Sync + fmt::Debug {
    fn eval(&self, theta: f64) -> Complex64;

    fn smoothness(&self) -> Smoothness;

    /// Angles of jump discontinuities.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Angles near which the function or its extension varies rapidly.
    fn feature_angles(&self) -> Vec<f64> {
        self.breakpoints()
    }

    /// Exact harmonic extension, when known.
    fn extension(&self, _z: Complex64) -> Option<Complex64> {
        None
    }

    /// Exact `|∇f̂(z)|`, when known.
    fn gradient_norm(&self, _z: Complex64) -> Option<f64> {
        None
    }

    /// Serializable description, when one exists.
    fn describe(&self) -> Option<ClosedSpec> {
        None
    }
}

/// A shared closed-form evaluator.
#[derive(Clone, Debug)]
pub struct ClosedForm(pub Arc<dyn BoundaryEval>);

impl ClosedForm {
    pub fn new(inner: impl BoundaryEval + 'static) -> Self {
        ClosedForm(Arc::new(inner))
    }
}

/// A function on the unit circle.
#[derive(Clone, Debug)]
pub enum BoundaryFunction {
    Fourier(FourierSeries),
    Samples(SampledGrid),
    Closed(ClosedForm),
}

impl BoundaryFunction {
    pub fn constant(c: Complex64) -> Self {
        BoundaryFunction::Fourier(FourierSeries::constant(c))
    }

    pub fn closed(inner: impl BoundaryEval + 'static) -> Self {
        BoundaryFunction::Closed(ClosedForm::new(inner))
    }

    /// Closed form from a plain closure; its extension uses kernel quadrature.
    pub fn from_fn(
        smoothness: Smoothness,
        breakpoints: Vec<f64>,
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::closed(FnBoundary { f: Box::new(f), smoothness, breakpoints })
    }

    /// The sign step: `+1` on `[-π/2, π/2)`, `-1` elsewhere.
    pub fn sign_step() -> Self {
        Self::closed(StepFunction::new(vec![-PI / 2.0, PI / 2.0], vec![ONE, -ONE]).unwrap())
    }

    /// Boundary values of an analytic function.
    pub fn from_analytic(h: AnalyticFunction) -> Self {
        Self::closed(AnalyticBoundary { h })
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        match self {
            BoundaryFunction::Fourier(f) => f.eval(theta),
            BoundaryFunction::Samples(g) => g.eval(theta),
            BoundaryFunction::Closed(c) => c.0.eval(theta),
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            BoundaryFunction::Fourier(_) => Smoothness::Analytic,
            BoundaryFunction::Samples(_) => Smoothness::PiecewiseConstant,
            BoundaryFunction::Closed(c) => c.0.smoothness(),
        }
    }

    /// Jump locations, for one-dimensional integrals.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            BoundaryFunction::Fourier(_) => Vec::new(),
            BoundaryFunction::Samples(g) => g.cell_edges(),
            BoundaryFunction::Closed(c) => c.0.breakpoints(),
        }
    }

    /// Feature angles passed to two-dimensional integrators. Dense sample
    /// grids are left to adaptivity.
    pub fn feature_angles(&self) -> Vec<f64> {
        match self {
            BoundaryFunction::Fourier(_) => Vec::new(),
            BoundaryFunction::Samples(g) if g.len() <= 64 => g.cell_edges(),
            BoundaryFunction::Samples(_) => Vec::new(),
            BoundaryFunction::Closed(c) => c.0.feature_angles(),
        }
    }

    pub fn is_real(&self, tol: f64) -> bool {
        match self {
            BoundaryFunction::Fourier(f) => f.is_real(tol),
            BoundaryFunction::Samples(g) => g.values.iter().all(|v| v.im.abs() <= tol * v.norm().max(1.0)),
            BoundaryFunction::Closed(c) => (0..512).all(|k| {
                let v = c.0.eval(k as f64 * TAU / 512.0);
                v.im.abs() <= tol * v.norm().max(1.0)
            }),
        }
    }

    /// Coefficient form, promoting samples by a discrete Fourier transform.
    pub fn to_fourier(&self) -> Option<FourierSeries> {
        match self {
            BoundaryFunction::Fourier(f) => Some(f.clone()),
            BoundaryFunction::Samples(g) => Some(g.to_fourier()),
            BoundaryFunction::Closed(_) => None,
        }
    }

    pub fn sampled(&self, m: usize) -> Result<SampledGrid> {
        match self {
            BoundaryFunction::Samples(g) if g.len() == m => Ok(g.clone()),
            _ => SampledGrid::from_fn(m, |t| self.eval(t)),
        }
    }

    /// `θ ↦ f(θ - φ)`.
    pub fn rotated(&self, phi: f64) -> Self {
        match self {
            BoundaryFunction::Fourier(f) => BoundaryFunction::Fourier(f.rotated(phi)),
            _ => Self::closed(Transformed { inner: self.clone(), factor: ONE, rotation: phi, conj: false }),
        }
    }

    pub fn scaled(&self, k: Complex64) -> Self {
        match self {
            BoundaryFunction::Fourier(f) => BoundaryFunction::Fourier(f.scaled(k)),
            BoundaryFunction::Samples(g) => {
                BoundaryFunction::Samples(SampledGrid { values: g.values.iter().map(|v| v * k).collect() })
            }
            _ => Self::closed(Transformed { inner: self.clone(), factor: k, rotation: 0.0, conj: false }),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            BoundaryFunction::Fourier(f) => BoundaryFunction::Fourier(f.conj()),
            BoundaryFunction::Samples(g) => {
                BoundaryFunction::Samples(SampledGrid { values: g.values.iter().map(|v| v.conj()).collect() })
            }
            _ => Self::closed(Transformed { inner: self.clone(), factor: ONE, rotation: 0.0, conj: true }),
        }
    }

    /// `f ∘ σ_a` on the circle.
    pub fn compose_mobius(&self, a: DiskPoint) -> Self {
        Self::closed(MobiusComposed { inner: self.clone(), map: MobiusMap::new(a) })
    }

    /// Harmonic extension with the best available method.
    pub fn extension_field(&self) -> ExtensionField {
        match self {
            BoundaryFunction::Fourier(f) => ExtensionField::Coefficients(f.clone()),
            BoundaryFunction::Samples(g) => ExtensionField::Coefficients(g.to_fourier()),
            BoundaryFunction::Closed(c) => {
                if c.0.extension(Complex64::new(0.0, 0.0)).is_some() {
                    ExtensionField::Exact(c.clone())
                } else {
                    ExtensionField::Kernel(c.clone())
                }
            }
        }
    }
}

/// How the harmonic extension of a boundary function is evaluated.
#[derive(Clone, Debug)]
pub enum ExtensionField {
    /// Coefficient sums `Σ c_n r^{|n|} e^{inθ}`.
    Coefficients(FourierSeries),
    /// The closed form's own extension.
    Exact(ClosedForm),
    /// Adaptive quadrature of the Poisson integral.
    Kernel(ClosedForm),
}

/// Relative tolerance for Poisson-kernel quadrature.
const KERNEL_TOL: f64 = 1e-10;

impl ExtensionField {
    pub fn method(&self) -> &'static str {
        match self {
            ExtensionField::Coefficients(_) => "coefficient-sum",
            ExtensionField::Exact(_) => "closed-form",
            ExtensionField::Kernel(_) => "kernel-quadrature",
        }
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        self.value_checked(z).0
    }

    pub fn value_checked(&self, z: Complex64) -> (Complex64, bool) {
        match self {
            ExtensionField::Coefficients(f) => (f.extension(z), true),
            ExtensionField::Exact(c) => (c.0.extension(z).unwrap(), true),
            ExtensionField::Kernel(c) => kernel_extension(c, z),
        }
    }

    pub fn gradient_norm(&self, z: Complex64) -> f64 {
        self.gradient_checked(z).0
    }

    pub fn gradient_checked(&self, z: Complex64) -> (f64, bool) {
        match self {
            ExtensionField::Coefficients(f) => (f.gradient_norm(z), true),
            ExtensionField::Exact(c) => (c.0.gradient_norm(z).unwrap(), true),
            ExtensionField::Kernel(c) => kernel_gradient(c, z),
        }
    }

    pub fn hints(&self) -> Vec<f64> {
        match self {
            ExtensionField::Coefficients(_) => Vec::new(),
            ExtensionField::Exact(c) | ExtensionField::Kernel(c) => c.0.feature_angles(),
        }
    }
}

fn kernel_breaks(c: &ClosedForm, z: Complex64) -> Vec<f64> {
    let t = z.arg();
    let mut b = vec![t - TAU, t, t + TAU];
    for x in c.0.breakpoints() {
        b.extend([x - TAU, x, x + TAU]);
    }
    b
}

fn kernel_extension(c: &ClosedForm, z: Complex64) -> (Complex64, bool) {
    let r2 = z.norm_sqr();
    let f = |t: f64| {
        let k = (1.0 - r2) / (Complex64::from_polar(1.0, t) - z).norm_sqr();
        c.0.eval(t) * k
    };
    let res = adaptive(f, -PI, PI, &kernel_breaks(c, z), KERNEL_TOL, 4000);
    (res.value / TAU, res.converged)
}

fn kernel_gradient(c: &ClosedForm, z: Complex64) -> (f64, bool) {
    // P = Re K with K = (ζ+z)/(ζ-z); ∂_x P = Re K', ∂_y P = -Im K', K' = 2ζ/(ζ-z)²
    let f = |t: f64| {
        let zeta = Complex64::from_polar(1.0, t);
        let kp = 2.0 * zeta / ((zeta - z) * (zeta - z));
        let v = c.0.eval(t);
        [v.re * kp.re, v.im * kp.re, v.re * kp.im, v.im * kp.im]
    };
    let res = adaptive(f, -PI, PI, &kernel_breaks(c, z), KERNEL_TOL, 4000);
    let [a, b, cc, d] = res.value;
    let fx = Complex64::new(a, b) / TAU;
    let fy = -Complex64::new(cc, d) / TAU;
    ((fx.norm_sqr() + fy.norm_sqr()).sqrt(), res.converged)
}

// ---------------------------------------------------------------------------
// closed forms

struct FnBoundary {
    f: Box<dyn Fn(f64) -> Complex64 + Send + Sync>,
    smoothness: Smoothness,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for FnBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnBoundary").field("smoothness", &self.smoothness).finish_non_exhaustive()
    }
}

impl BoundaryEval for FnBoundary {
    fn eval(&self, theta: f64) -> Complex64 {
        (self.f)(theta)
    }
    fn smoothness(&self) -> Smoothness {
        self.smoothness
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

/// Piecewise-constant function: `values[i]` on `[breaks[i], breaks[i+1])`, cyclically.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<Complex64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != values.len() {
            return Err(Error::InvalidParameter("step function needs one value per breakpoint".into()));
        }
        let mut pairs: Vec<(f64, Complex64)> =
            breaks.iter().map(|&b| normalize_angle(b)).zip(values.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if pairs.windows(2).any(|w| w[1].0 - w[0].0 < 1e-12) {
            return Err(Error::InvalidParameter("step breakpoints must be distinct".into()));
        }
        Ok(StepFunction { breaks: pairs.iter().map(|p| p.0).collect(), values: pairs.iter().map(|p| p.1).collect() })
    }

    fn piece(&self, theta: f64) -> usize {
        let t = normalize_angle(theta);
        match self.breaks.partition_point(|&b| b <= t) {
            0 => self.breaks.len() - 1,
            k => k - 1,
        }
    }

    fn jumps(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        let n = self.breaks.len();
        (0..n).map(move |i| (self.breaks[i], self.values[i] - self.values[(i + n - 1) % n]))
    }
}

impl BoundaryEval for StepFunction {
    fn eval(&self, theta: f64) -> Complex64 {
        self.values[self.piece(theta)]
    }
    fn smoothness(&self) -> Smoothness {
        Smoothness::PiecewiseConstant
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
    fn extension(&self, z: Complex64) -> Option<Complex64> {
        // sum of values times harmonic measures of the pieces
        let n = self.breaks.len();
        if n == 1 {
            return Some(self.values[0]);
        }
        let mut acc = ZERO;
        for i in 0..n {
            let a = self.breaks[i];
            let b = if i + 1 < n { self.breaks[i + 1] } else { self.breaks[0] + TAU };
            let sweep = ((Complex64::from_polar(1.0, b) - z).arg() - (Complex64::from_polar(1.0, a) - z).arg())
                .rem_euclid(TAU);
            acc += self.values[i] * ((2.0 * sweep - (b - a)) / TAU);
        }
        Some(acc)
    }
    fn gradient_norm(&self, z: Complex64) -> Option<f64> {
        let (mut gu, mut gv) = (ZERO, ZERO);
        for (b, jump) in self.jumps() {
            let k = 1.0 / (Complex64::from_polar(1.0, b) - z);
            gu += k * jump.re;
            gv += k * jump.im;
        }
        Some((gu.norm_sqr() + gv.norm_sqr()).sqrt() / PI)
    }
    fn describe(&self) -> Option<ClosedSpec> {
        Some(ClosedSpec::Step {
            breakpoints: self.breaks.clone(),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        })
    }
}

/// Boundary values `θ ↦ h(e^{iθ})` of an analytic function.
#[derive(Debug, Clone)]
pub struct AnalyticBoundary {
    pub h: AnalyticFunction,
}

impl BoundaryEval for AnalyticBoundary {
    fn eval(&self, theta: f64) -> Complex64 {
        self.h.boundary_value(theta)
    }
    fn smoothness(&self) -> Smoothness {
        Smoothness::Analytic
    }
    fn feature_angles(&self) -> Vec<f64> {
        self.h.feature_angles()
    }
    fn extension(&self, z: Complex64) -> Option<Complex64> {
        Some(self.h.eval(z))
    }
    fn gradient_norm(&self, z: Complex64) -> Option<f64> {
        Some(std::f64::consts::SQRT_2 * self.h.derivative(z).norm())
    }
    fn describe(&self) -> Option<ClosedSpec> {
        match &self.h {
            AnalyticFunction::Blaschke(b) => {
                Some(ClosedSpec::Blaschke { zeros: b.zeros().iter().map(|&z| z.into()).collect() })
            }
            AnalyticFunction::LogKernel(g) => Some(ClosedSpec::LogKernel { w: g.w().into() }),
            _ => None,
        }
    }
}

/// `f ∘ σ_a` restricted to the circle.
#[derive(Debug, Clone)]
pub struct MobiusComposed {
    inner: BoundaryFunction,
    map: MobiusMap,
}

impl BoundaryEval for MobiusComposed {
    fn eval(&self, theta: f64) -> Complex64 {
        self.inner.eval(self.map.boundary_angle(theta))
    }
    fn smoothness(&self) -> Smoothness {
        self.inner.smoothness()
    }
    fn breakpoints(&self) -> Vec<f64> {
        // σ_a is an involution, so preimages are images
        self.inner.breakpoints().into_iter().map(|b| self.map.boundary_angle(b)).collect()
    }
    fn feature_angles(&self) -> Vec<f64> {
        let mut v: Vec<f64> =
            self.inner.feature_angles().into_iter().map(|b| self.map.boundary_angle(b)).collect();
        if self.map.center().norm() > 0.0 {
            v.push(self.map.center().arg());
        }
        v
    }
    fn extension(&self, z: Complex64) -> Option<Complex64> {
        match self.inner.extension_field() {
            ExtensionField::Kernel(_) => None,
            field => Some(field.value(self.map.eval(z))),
        }
    }
    fn gradient_norm(&self, z: Complex64) -> Option<f64> {
        match self.inner.extension_field() {
            ExtensionField::Kernel(_) => None,
            field => Some(field.gradient_norm(self.map.eval(z)) * self.map.derivative_modulus(z)),
        }
    }
}

/// `θ ↦ k · f(θ - φ)`, optionally conjugated.
#[derive(Debug, Clone)]
struct Transformed {
    inner: BoundaryFunction,
    factor: Complex64,
    rotation: f64,
    conj: bool,
}

impl Transformed {
    fn apply(&self, v: Complex64) -> Complex64 {
        self.factor * if self.conj { v.conj() } else { v }
    }
}

impl BoundaryEval for Transformed {
    fn eval(&self, theta: f64) -> Complex64 {
        self.apply(self.inner.eval(theta - self.rotation))
    }
    fn smoothness(&self) -> Smoothness {
        self.inner.smoothness()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().into_iter().map(|b| b + self.rotation).collect()
    }
    fn feature_angles(&self) -> Vec<f64> {
        self.inner.feature_angles().into_iter().map(|b| b + self.rotation).collect()
    }
    fn extension(&self, z: Complex64) -> Option<Complex64> {
        match self.inner.extension_field() {
            ExtensionField::Kernel(_) => None,
            field => Some(self.apply(field.value(z * Complex64::from_polar(1.0, -self.rotation)))),
        }
    }
    fn gradient_norm(&self, z: Complex64) -> Option<f64> {
        match self.inner.extension_field() {
            ExtensionField::Kernel(_) => None,
            field => Some(self.factor.norm() * field.gradient_norm(z * Complex64::from_polar(1.0, -self.rotation))),
        }
    }
}

// ---------------------------------------------------------------------------
// serialization

/// Serializable closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedSpec {
    Step { breakpoints: Vec<f64>, values: Vec<[f64; 2]> },
    Blaschke { zeros: Vec<[f64; 2]> },
    LogKernel { w: [f64; 2] },
}

impl ClosedSpec {
    pub fn build(&self) -> Result<BoundaryFunction> {
        Ok(match self {
            ClosedSpec::Step { breakpoints, values } => BoundaryFunction::closed(StepFunction::new(
                breakpoints.clone(),
                values.iter().map(|v| Complex64::new(v[0], v[1])).collect(),
            )?),
            ClosedSpec::Blaschke { zeros } => {
                let zs = zeros.iter().map(|&z| DiskPoint::try_from(z)).collect::<Result<Vec<_>>>()?;
                BoundaryFunction::from_analytic(AnalyticFunction::Blaschke(BlaschkeProduct::new(zs)))
            }
            ClosedSpec::LogKernel { w } => BoundaryFunction::from_analytic(AnalyticFunction::LogKernel(
                LogKernel::new(DiskPoint::try_from(*w)?),
            )),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct FourierData {
    degree: usize,
    coeffs: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "repr", content = "data", rename_all = "lowercase")]
enum Repr {
    Fourier(FourierData),
    Samples(Vec<[f64; 2]>),
    Closed(ClosedSpec),
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

fn complexes(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|c| Complex64::new(c[0], c[1])).collect()
}

impl Serialize for BoundaryFunction {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            BoundaryFunction::Fourier(f) => Repr::Fourier(FourierData { degree: f.degree(), coeffs: pairs(&f.coeffs) }),
            BoundaryFunction::Samples(g) => Repr::Samples(pairs(&g.values)),
            BoundaryFunction::Closed(c) => Repr::Closed(
                c.0.describe().ok_or_else(|| serde::ser::Error::custom("closed form has no serializable description"))?,
            ),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BoundaryFunction {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = Repr::deserialize(de)?;
        match repr {
            Repr::Fourier(d) => {
                if d.coeffs.len() != 2 * d.degree + 1 {
                    return Err(D::Error::custom(format!(
                        "degree {} needs {} coefficients, got {}",
                        d.degree,
                        2 * d.degree + 1,
                        d.coeffs.len()
                    )));
                }
                FourierSeries::new(complexes(&d.coeffs)).map(BoundaryFunction::Fourier).map_err(D::Error::custom)
            }
            Repr::Samples(v) => SampledGrid::new(complexes(&v)).map(BoundaryFunction::Samples).map_err(D::Error::custom),
            Repr::Closed(spec) => spec.build().map_err(D::Error::custom),
        }
    }
}
