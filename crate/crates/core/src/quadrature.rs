//! Singular double integrals over arcs, weighted area integrals over the disk,
//! and one-dimensional rules.
//!
//! The arc double integral is computed in difference coordinates
//! `(x, u) = (θ, t - θ)`: the quotient `|f(x) - f(x+u)|^p / |e^{ix} - e^{i(x+u)}|^{2-s}`
//! is integrated over `u` with Gauss-Legendre panels graded geometrically toward
//! the diagonal, and over `x` with adaptive Gauss-Kronrod. The band `u < h` is
//! excluded and bounded separately.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check, Result};
use crate::functions::BoundaryFunction;
use crate::geometry::ArcT;

/// Discretisation parameters shared by every integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    /// Angular resolution `M`, a power of two. Sets the Gauss-Legendre panel
    /// order `M/16` of the fine level; the coarse level uses `M/2`.
    pub angular: usize,
    /// Width of the excluded diagonal band, relative to the arc length.
    pub band: f64,
    /// Number of dyadic radial levels `1 - r ~ 2^{-j}`.
    pub radial_levels: usize,
    /// Relative tolerance for convergence flags.
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { angular: 128, band: 1e-5, radial_levels: 12, tolerance: 1e-3 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        check(self.angular >= 32 && self.angular.is_power_of_two(), || {
            format!("angular resolution {} must be a power of two >= 32", self.angular)
        })?;
        check(self.band > 0.0 && self.band < 0.25, || format!("band {} outside (0, 0.25)", self.band))?;
        check(self.radial_levels >= 4, || format!("radial levels {} < 4", self.radial_levels))?;
        check(self.tolerance > 0.0 && self.tolerance.is_finite(), || {
            format!("tolerance {} must be positive", self.tolerance)
        })
    }

    /// Gauss-Legendre order per panel at the fine level.
    pub fn panel_order(&self) -> usize {
        (self.angular / 16).clamp(2, 64)
    }

    /// This spec with doubled angular resolution and two more radial levels.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            angular: self.angular * 2,
            band: self.band / 4.0,
            radial_levels: self.radial_levels + 2,
            tolerance: self.tolerance,
        }
    }

    /// Cheaper spec for ranking candidates inside point searches: a quarter
    /// of the panel order and a looser inner tolerance, same band.
    pub fn scan(&self) -> Self {
        QuadratureSpec { angular: (self.angular / 4).max(32), tolerance: self.tolerance * 100.0, ..*self }
    }

    pub(crate) fn inner_tolerance(&self) -> f64 {
        (self.tolerance * 1e-3).clamp(1e-11, 1e-5)
    }
}

/// A quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

impl IntegralEstimate {
    pub(crate) fn from_levels(fine: f64, coarse: f64, extra: f64, tol: f64) -> Self {
        let error = (fine - coarse).abs() + extra;
        let converged = error <= tol * fine.abs() || (fine == 0.0 && error == 0.0);
        IntegralEstimate { value: fine, error, converged }
    }

    pub fn exact(value: f64) -> Self {
        IntegralEstimate { value, error: 0.0, converged: true }
    }

    pub fn scaled(self, k: f64) -> Self {
        IntegralEstimate { value: self.value * k, error: self.error * k.abs(), converged: self.converged }
    }
}

// ---------------------------------------------------------------------------
// rules

const MAX_GL_ORDER: usize = 64;

fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    static RULES: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    assert!((1..=MAX_GL_ORDER).contains(&n), "Gauss-Legendre order {n} unsupported");
    &RULES.get_or_init(|| (0..=MAX_GL_ORDER).map(|n| if n == 0 { vec![] } else { legendre_rule(n) }).collect())[n]
}

/// Values that can be accumulated by the integrators.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, k: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(mut self, o: Self) -> Self {
        for (a, b) in self.iter_mut().zip(o) {
            *a += b;
        }
        self
    }
    fn scale(mut self, k: f64) -> Self {
        for a in self.iter_mut() {
            *a *= k;
        }
        self
    }
    fn magnitude(self) -> f64 {
        self.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }
}

/// Fixed-order Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre_integral<V: QuadValue>(f: impl Fn(f64) -> V, a: f64, b: f64, n: usize) -> V {
    let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
    let mut acc = V::zero();
    for &(x, w) in gauss_legendre(n) {
        acc = acc.add(f(m + h * x).scale(w));
    }
    acc.scale(h)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<V: QuadValue>(f: &impl Fn(f64) -> V, a: f64, b: f64) -> (V, f64) {
    let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
    let fc = f(m);
    let mut k = fc.scale(GK_WK[7]);
    let mut g = fc.scale(GK_WG[3]);
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(m - x).add(f(m + x));
        k = k.add(s.scale(GK_WK[i]));
        if i % 2 == 1 {
            g = g.add(s.scale(GK_WG[i / 2]));
        }
    }
    let k = k.scale(h);
    let g = g.scale(h);
    (k, k.add(g.scale(-1.0)).magnitude())
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

struct ByError(f64, usize);

impl PartialEq for ByError {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for ByError {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0).then(o.1.cmp(&self.1))
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive<V> {
    pub value: V,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive Gauss-Kronrod (7/15) on `[a, b]`, split first at
/// `breaks` (points outside the interval are ignored).
pub fn adaptive<V: QuadValue>(
    f: impl Fn(f64) -> V,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel: f64,
    max_panels: usize,
) -> Adaptive<V> {
    if b <= a {
        return Adaptive { value: V::zero(), error: 0.0, converged: true };
    }
    let width = b - a;
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    let mut edges = vec![a];
    for c in cuts {
        if c - edges.last().unwrap() > 1e-13 * width {
            edges.push(c);
        }
    }
    if b - edges.last().unwrap() <= 1e-13 * width && edges.len() > 1 {
        edges.pop();
    }
    edges.push(b);

    let mut panels: Vec<Panel<V>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut total = V::zero();
    let mut err = 0.0;
    for w in edges.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        total = total.add(v);
        err += e;
        heap.push(ByError(e, panels.len()));
        panels.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    let min_width = 1e-14 * width.max(1e-300);
    while err > rel * total.magnitude() && panels.len() < max_panels {
        let Some(ByError(_, idx)) = heap.pop() else { break };
        let p = &panels[idx];
        if p.b - p.a < min_width {
            continue;
        }
        let (pa, pb, pv, pe) = (p.a, p.b, p.value, p.error);
        let mid = 0.5 * (pa + pb);
        let (v1, e1) = gk15(&f, pa, mid);
        let (v2, e2) = gk15(&f, mid, pb);
        total = total.add(pv.scale(-1.0)).add(v1).add(v2);
        err += e1 + e2 - pe;
        panels[idx] = Panel { a: pa, b: mid, value: v1, error: e1 };
        heap.push(ByError(e1, idx));
        heap.push(ByError(e2, panels.len()));
        panels.push(Panel { a: mid, b: pb, value: v2, error: e2 });
    }
    // re-sum to shed drift from the running updates
    let mut value = V::zero();
    let mut error = 0.0;
    for p in &panels {
        value = value.add(p.value);
        error += p.error;
    }
    Adaptive { value, error, converged: error <= rel * value.magnitude() || error == 0.0 }
}

/// Uniform trapezoid rule with two-level error estimate for a periodic density.
pub fn circle_integral(g: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> IntegralEstimate {
    let m = spec.angular;
    let h = TAU / m as f64;
    let mut even = 0.0;
    let mut odd = 0.0;
    for k in 0..m {
        let v = g(k as f64 * h);
        if k % 2 == 0 {
            even += v;
        } else {
            odd += v;
        }
    }
    let fine = (even + odd) * h;
    let coarse = even * 2.0 * h;
    IntegralEstimate::from_levels(fine, coarse, 0.0, spec.tolerance)
}

// ---------------------------------------------------------------------------
// singular double integrals

type PairFn<'a> = &'a (dyn Fn(f64, f64) -> f64 + Sync);

/// `∫_I ∫_I N(x, y) W(x, y) / |e^{ix} - e^{iy}|^{2-s} dx dy` for a symmetric numerator `N`.
pub struct SingularDouble<'a> {
    pub numerator: PairFn<'a>,
    pub weight: Option<PairFn<'a>>,
    pub s: f64,
    /// Angles where the integrand has kinks or sharp features.
    pub hints: Vec<f64>,
}

struct Layout {
    a0: f64,
    len: f64,
    periodic: bool,
    u_max: f64,
}

impl Layout {
    fn new(arc: &ArcT) -> Self {
        if arc.is_full() {
            Layout { a0: 0.0, len: TAU, periodic: true, u_max: PI }
        } else {
            Layout { a0: arc.start(), len: arc.length(), periodic: false, u_max: arc.length() }
        }
    }

    /// Graded u-panels and the effective band width.
    fn u_panels(&self, band: f64) -> (Vec<(f64, f64)>, f64) {
        let u = self.u_max;
        let mut panels = vec![(u * 0.75, u), (u * 0.5, u * 0.75)];
        let h_req = band * self.len;
        let mut hi = u * 0.5;
        while hi / 2.0 >= h_req * (1.0 - 1e-12) {
            panels.push((hi / 2.0, hi));
            hi /= 2.0;
        }
        (panels, hi)
    }
}

impl SingularDouble<'_> {
    fn kernel(&self, u: f64) -> f64 {
        (2.0 * (u / 2.0).sin()).abs().powf(self.s - 2.0)
    }

    /// `∫ N(x, x+u) W(x, x+u) dx` over the admissible x-range.
    fn slice(&self, lay: &Layout, u: f64, rel: f64) -> f64 {
        let (lo, hi) = if lay.periodic { (0.0, TAU) } else { (lay.a0, lay.a0 + lay.len - u) };
        if hi <= lo {
            return 0.0;
        }
        let mut breaks = Vec::with_capacity(2 * self.hints.len());
        for &h in &self.hints {
            for c in [h, h - u] {
                let shifted = lo + (c - lo).rem_euclid(TAU);
                breaks.push(shifted);
            }
        }
        let f = |x: f64| {
            let y = x + u;
            let n = (self.numerator)(x, y);
            if n == 0.0 {
                return 0.0;
            }
            match self.weight {
                Some(w) => n * w(x, y),
                None => n,
            }
        };
        adaptive(f, lo, hi, &breaks, rel, 400).value
    }

    fn level(&self, lay: &Layout, panels: &[(f64, f64)], order: usize, rel: f64) -> f64 {
        let mut total = 0.0;
        for &(a, b) in panels {
            total += gauss_legendre_integral(|u| self.kernel(u) * self.slice(lay, u, rel), a, b, order);
        }
        2.0 * total
    }

    fn band_bound(&self, lay: &Layout, h: f64, rel: f64) -> f64 {
        let d = self.slice(lay, h, rel);
        2.0 * (PI / 2.0).powf(2.0 - self.s) * d * h.powf(self.s - 1.0) / self.s
    }

    /// Fine-level value only (no band, no second level); used inside sup searches.
    pub fn value(&self, arc: &ArcT, spec: &QuadratureSpec) -> f64 {
        let lay = Layout::new(arc);
        let (panels, _) = lay.u_panels(spec.band);
        self.level(&lay, &panels, spec.panel_order(), spec.inner_tolerance())
    }

    pub fn estimate(&self, arc: &ArcT, spec: &QuadratureSpec) -> IntegralEstimate {
        let lay = Layout::new(arc);
        let (panels, h) = lay.u_panels(spec.band);
        let rel = spec.inner_tolerance();
        let q = spec.panel_order();
        let fine = self.level(&lay, &panels, q, rel);
        let coarse = self.level(&lay, &panels, (q / 2).max(1), rel);
        let band = self.band_bound(&lay, h, rel);
        IntegralEstimate::from_levels(fine, coarse, band, spec.tolerance)
    }

    /// Contribution of the excluded band `u < h`, computed by brute force on
    /// a finer graded mesh (used to validate the band bound).
    pub fn band_contribution(&self, arc: &ArcT, spec: &QuadratureSpec, depth: usize) -> (f64, f64) {
        let lay = Layout::new(arc);
        let (_, h) = lay.u_panels(spec.band);
        let mut panels = Vec::new();
        let mut hi = h;
        for _ in 0..depth {
            panels.push((hi / 2.0, hi));
            hi /= 2.0;
        }
        let rel = spec.inner_tolerance();
        (self.level(&lay, &panels, 16, rel), self.band_bound(&lay, h, rel))
    }
}

/// The numerator `|f(x) - f(y)|^p` for a boundary function.
pub(crate) fn difference_power(f: &BoundaryFunction, p: f64) -> impl Fn(f64, f64) -> f64 + Sync + '_ {
    let half = p / 2.0;
    move |x, y| {
        let d = (f.eval(x) - f.eval(y)).norm_sqr();
        if p == 2.0 {
            d
        } else {
            d.powf(half)
        }
    }
}

/// `∫_I ∫_I |f(ζ) - f(η)|^p / |ζ - η|^{2-s} |dζ| |dη|`.
pub fn arc_double_integral(
    f: &BoundaryFunction,
    arc: &ArcT,
    p: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate> {
    check(p > 1.0, || format!("p = {p} must exceed 1"))?;
    check(s > 0.0 && s < 1.0, || format!("s = {s} outside (0, 1)"))?;
    spec.validate()?;
    let num = difference_power(f, p);
    let sd = SingularDouble { numerator: &num, weight: None, s, hints: f.feature_angles() };
    Ok(sd.estimate(arc, spec))
}

// ---------------------------------------------------------------------------
// disk integrals

/// Integration region for [`disk_weighted_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiskRegion {
    Disk,
    Sector(ArcT),
}

/// `∫_R g(z) (1 - |z|²)^α dA(z)` with density hints.
pub struct DiskIntegral<'a> {
    pub density: &'a (dyn Fn(Complex64) -> f64 + Sync),
    pub alpha: f64,
    pub hints: Vec<f64>,
}

impl DiskIntegral<'_> {
    fn ring(&self, r: f64, t0: f64, span: f64, rel: f64) -> f64 {
        let n0 = 8usize;
        let mut breaks: Vec<f64> = (1..n0).map(|k| t0 + span * k as f64 / n0 as f64).collect();
        for &h in &self.hints {
            breaks.push(t0 + (h - t0).rem_euclid(TAU));
        }
        let g = |t: f64| (self.density)(Complex64::from_polar(r, t));
        adaptive(g, t0, t0 + span, &breaks, rel, 400).value
    }

    fn level(&self, region: &DiskRegion, levels: usize, order: usize, rel: f64) -> f64 {
        let (w_max, t0, span) = match region {
            DiskRegion::Disk => (1.0, 0.0, TAU),
            DiskRegion::Sector(arc) => (arc.sector_depth(), arc.start(), arc.length()),
        };
        let beta = self.alpha + 1.0;
        let alpha = self.alpha;
        let radial = |w: f64| {
            let r = 1.0 - w;
            if r <= 0.0 {
                return 0.0;
            }
            (2.0 - w).powf(alpha) * r * self.ring(r, t0, span, rel)
        };
        // innermost panel: v = w^β absorbs the boundary singularity of the weight
        let w_min = w_max * 0.5f64.powi(levels as i32);
        let mut total = gauss_legendre_integral(|v| radial(v.powf(1.0 / beta)), 0.0, w_min.powf(beta), order) / beta;
        // dyadic panels: w^α is analytic on a neighbourhood of each
        for k in (1..=levels).rev() {
            let (w0, w1) = (w_max * 0.5f64.powi(k as i32), w_max * 0.5f64.powi(k as i32 - 1));
            total += gauss_legendre_integral(|w| w.powf(alpha) * radial(w), w0, w1, order);
        }
        total
    }

    pub fn value(&self, region: &DiskRegion, spec: &QuadratureSpec) -> f64 {
        self.level(region, spec.radial_levels, spec.panel_order(), spec.inner_tolerance())
    }

    pub fn estimate(&self, region: &DiskRegion, spec: &QuadratureSpec) -> IntegralEstimate {
        let q = spec.panel_order();
        let rel = spec.inner_tolerance();
        let fine = self.level(region, spec.radial_levels, q, rel);
        let coarse = self.level(region, spec.radial_levels, (q / 2).max(1), rel);
        IntegralEstimate::from_levels(fine, coarse, 0.0, spec.tolerance)
    }
}

/// `∫_R g(z) (1 - |z|²)^α dA(z)` over the disk or a Carleson sector.
pub fn disk_weighted_integral(
    g: &(dyn Fn(Complex64) -> f64 + Sync),
    alpha: f64,
    region: DiskRegion,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate> {
    check(alpha > -1.0, || format!("weight exponent {alpha} must exceed -1"))?;
    spec.validate()?;
    Ok(DiskIntegral { density: g, alpha, hints: vec![] }.estimate(&region, spec))
}
