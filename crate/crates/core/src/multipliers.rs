//! Pointwise multipliers between boundary spaces: regime classification,
//! the multiplier condition, essential ranges, spectra and the lemma harness.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::carleson::{log_carleson_sup, CarlesonForm, DiscretePointMeasure};
use crate::error::{check, Error, Result};
use crate::functions::{arc_average, lifted_breaks, AnalyticFunction, BlaschkeProduct, BoundaryFunction, FourierSeries, SampledGrid};
use crate::geometry::{angle_diff, one_minus_mobius_sq_raw, ArcT, DiskPoint};
use crate::quadrature::{adaptive, DiskIntegral, DiskRegion, QuadratureSpec, SingularDouble};
use crate::search::SupSearchSpec;
use crate::seminorms::{bp_s_integral, log_weighted_seminorm, mean_oscillation, qps_arc_functional, SeminormReport, SpaceParams};

/// The case of the multiplier trichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegimeCase {
    #[serde(rename = "Case1-NonTrivial")]
    Case1NonTrivial,
    #[serde(rename = "Case2-NonTrivial")]
    Case2NonTrivial,
    #[serde(rename = "Case2-Trivial")]
    Case2Trivial,
    #[serde(rename = "Case3-Trivial")]
    Case3Trivial,
}

impl RegimeCase {
    pub fn tag(&self) -> &'static str {
        match self {
            RegimeCase::Case1NonTrivial => "Case1-NonTrivial",
            RegimeCase::Case2NonTrivial => "Case2-NonTrivial",
            RegimeCase::Case2Trivial => "Case2-Trivial",
            RegimeCase::Case3Trivial => "Case3-Trivial",
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, RegimeCase::Case2Trivial | RegimeCase::Case3Trivial)
    }
}

impl std::fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeDecision {
    pub case: RegimeCase,
    /// `"L∞ + log condition"` or `"{0}"`.
    pub characterization: String,
    /// `(1 - s)/p₁`.
    pub source_index: f64,
    /// `(1 - r)/p₂`.
    pub target_index: f64,
}

pub fn classify_regime(p1: f64, p2: f64, s: f64, r: f64) -> Result<RegimeDecision> {
    check(p1 > 1.0 && p2 > 1.0 && p1.is_finite() && p2.is_finite(), || {
        format!("exponents p1 = {p1}, p2 = {p2} must exceed 1")
    })?;
    check(s > 0.0 && s < 1.0 && r > 0.0 && r < 1.0, || format!("s = {s}, r = {r} outside (0, 1)"))?;
    let (a, b) = ((1.0 - s) / p1, (1.0 - r) / p2);
    let case = if s > r {
        RegimeCase::Case3Trivial
    } else if p1 <= p2 {
        RegimeCase::Case1NonTrivial
    } else if a - b > 1e-12 * a.max(b) {
        // ties within rounding count as equality, which is trivial
        RegimeCase::Case2NonTrivial
    } else {
        RegimeCase::Case2Trivial
    };
    let characterization = if case.is_trivial() { "{0}" } else { "L∞ + log condition" }.to_string();
    Ok(RegimeDecision { case, characterization, source_index: a, target_index: b })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    True,
    False,
    /// The log-condition profile neither stabilized nor grew.
    Unresolved,
    /// Trivial regime: only the zero function multiplies.
    OnlyZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierReport {
    pub regime: RegimeDecision,
    /// Grid maximum of `|f|`.
    pub linf_bound: f64,
    /// `((1/M) Σ |f(θ_k)|^{p₁})^{1/p₁}` on the same grid.
    pub grid_p_mean: f64,
    pub log_condition: Option<SeminormReport>,
    pub verdict: Verdict,
}

/// Grid used for the sup and mean of `|f|`.
pub const LINF_GRID: usize = 4096;

pub fn multiplier_check(
    f: &BoundaryFunction,
    p1: f64,
    p2: f64,
    s: f64,
    r: f64,
    search: &SupSearchSpec,
    q: &QuadratureSpec,
) -> Result<MultiplierReport> {
    let regime = classify_regime(p1, p2, s, r)?;
    let samples: Vec<f64> = (0..LINF_GRID).map(|k| f.eval(k as f64 * TAU / LINF_GRID as f64).norm()).collect();
    let linf_bound = samples.iter().copied().fold(0.0, f64::max);
    let grid_p_mean = (samples.iter().map(|v| v.powf(p1)).sum::<f64>() / LINF_GRID as f64).powf(1.0 / p1);
    if regime.case.is_trivial() {
        return Ok(MultiplierReport { regime, linf_bound, grid_p_mean, log_condition: None, verdict: Verdict::OnlyZero });
    }
    let cond = log_weighted_seminorm(f, p2, r, search, q)?;
    let verdict = if !linf_bound.is_finite() || cond.divergent {
        Verdict::False
    } else if cond.converged {
        Verdict::True
    } else {
        Verdict::Unresolved
    };
    Ok(MultiplierReport { regime, linf_bound, grid_p_mean, log_condition: Some(cond), verdict })
}

// ---------------------------------------------------------------------------
// essential range and spectra

/// A finite union of square cells in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssentialRangeEstimate {
    /// Integer cell indices; cell `(i, j)` is `[i c, (i+1) c) × [j c, (j+1) c)`.
    pub cells: Vec<[i64; 2]>,
    pub cell_size: f64,
    pub eps: f64,
    pub threshold: f64,
}

fn cell_of(z: Complex64, c: f64) -> [i64; 2] {
    [(z.re / c).floor() as i64, (z.im / c).floor() as i64]
}

impl EssentialRangeEstimate {
    pub fn centers(&self) -> Vec<Complex64> {
        self.cells
            .iter()
            .map(|[i, j]| Complex64::new((*i as f64 + 0.5) * self.cell_size, (*j as f64 + 0.5) * self.cell_size))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains_cell_of(&self, z: Complex64) -> bool {
        self.cells.contains(&cell_of(z, self.cell_size))
    }

    /// Distance from `λ` to the nearest cell center.
    pub fn distance(&self, lambda: Complex64) -> f64 {
        self.centers().iter().map(|c| (c - lambda).norm()).fold(f64::INFINITY, f64::min)
    }
}

/// Cells containing at least one sample whose `ε`-ball around the center
/// captures at least `threshold · M` samples.
pub fn essential_range(f: &SampledGrid, eps: f64, cell: f64, threshold: f64) -> Result<EssentialRangeEstimate> {
    let m = f.len();
    check(cell > 0.0 && cell.is_finite(), || format!("cell size {cell} must be positive"))?;
    check(eps > 0.0 && eps.is_finite(), || format!("radius {eps} must be positive"))?;
    check(threshold > 1.0 / m as f64 && threshold <= 1.0, || {
        format!("threshold {threshold} must lie in (1/M, 1] with M = {m}")
    })?;
    let mut occupied: BTreeSet<[i64; 2]> = BTreeSet::new();
    for v in f.values() {
        occupied.insert(cell_of(*v, cell));
    }
    let need = (threshold * m as f64).ceil() as usize;
    let cells = occupied
        .iter()
        .filter(|[i, j]| {
            let c = Complex64::new((*i as f64 + 0.5) * cell, (*j as f64 + 0.5) * cell);
            f.values().iter().filter(|v| (*v - c).norm() < eps).count() >= need
        })
        .copied()
        .collect();
    Ok(EssentialRangeEstimate { cells, cell_size: cell, eps, threshold })
}

/// Essential range with the default radius `2c` and threshold `4/M`.
pub fn essential_range_default(f: &SampledGrid, cell: f64) -> Result<EssentialRangeEstimate> {
    essential_range(f, 2.0 * cell, cell, 4.0 / f.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    Boundary,
    Analytic,
}

/// Check of `sup |1/(f - λ)| ≤ 1/(δ - slack)` at a point `λ` away from the range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub lambda: [f64; 2],
    pub distance: f64,
    pub sup_inverse: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub mode: SpectrumMode,
    pub set: EssentialRangeEstimate,
    pub note: String,
    pub probes: Vec<ProbeResult>,
    /// Set when the function exceeded the growth cap on the sampling grid.
    pub unbounded: bool,
}

/// Sample count and cell size for boundary spectra.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumGrid {
    pub samples: usize,
    pub cell: f64,
}

impl Default for SpectrumGrid {
    fn default() -> Self {
        SpectrumGrid { samples: 4096, cell: 0.05 }
    }
}

fn probe(values: &[Complex64], set: &EssentialRangeEstimate, lambda: Complex64) -> Option<ProbeResult> {
    let slack = set.cell_size * std::f64::consts::FRAC_1_SQRT_2;
    let delta = set.distance(lambda);
    if delta <= 2.0 * slack {
        return None;
    }
    // only samples in marked cells: the rest are a null set at this resolution
    let sup_inverse = values
        .iter()
        .filter(|v| set.contains_cell_of(**v))
        .map(|v| 1.0 / (v - lambda).norm())
        .fold(0.0, f64::max);
    let bound = 1.0 / (delta - slack);
    Some(ProbeResult { lambda: [lambda.re, lambda.im], distance: delta, sup_inverse, bound, passed: sup_inverse <= bound })
}

/// Spectrum of multiplication by `f` on the boundary space with exponents
/// `params`: the essential range, with invertibility probes away from it.
pub fn spectrum_boundary(
    f: &BoundaryFunction,
    params: SpaceParams,
    grid: &SpectrumGrid,
    search: &SupSearchSpec,
    q: &QuadratureSpec,
) -> Result<SpectrumReport> {
    let check_report = multiplier_check(f, params.p, params.p, params.s, params.s, search, q)?;
    if check_report.verdict != Verdict::True {
        return Err(Error::NotApplicable(format!(
            "multiplier check returned {:?}; the operator is not known to be bounded",
            check_report.verdict
        )));
    }
    let samples = f.sampled(grid.samples)?;
    let set = essential_range_default(&samples, grid.cell)?;
    let centers = set.centers();
    let (lo_re, hi_re, lo_im, hi_im) = centers.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), z| (a.min(z.re), b.max(z.re), c.min(z.im), d.max(z.im)),
    );
    let pad = 0.5 + 4.0 * grid.cell;
    let mut lambdas = vec![Complex64::new(0.0, 0.0)];
    for i in 0..=8 {
        for j in 0..=8 {
            lambdas.push(Complex64::new(
                lo_re - pad + (hi_re - lo_re + 2.0 * pad) * i as f64 / 8.0,
                lo_im - pad + (hi_im - lo_im + 2.0 * pad) * j as f64 / 8.0,
            ));
        }
    }
    let probes = lambdas.into_iter().filter_map(|l| probe(samples.values(), &set, l)).collect();
    Ok(SpectrumReport {
        mode: SpectrumMode::Boundary,
        set,
        note: "essential range of the boundary samples".into(),
        probes,
        unbounded: false,
    })
}

/// Growth cap flagging a function as not bounded on the sampling grid.
pub const GROWTH_CAP: f64 = 1e6;

/// Spectrum of multiplication by an analytic `h`: the closure of `h(D)`,
/// sampled on a polar grid with step `c/4` and marked cell by cell.
pub fn spectrum_analytic(h: &AnalyticFunction, cell: f64) -> Result<SpectrumReport> {
    check(cell > 0.0 && cell <= 1.0, || format!("cell size {cell} outside (0, 1]"))?;
    let step = cell / 4.0;
    let n_r = (1.0 / step).ceil() as usize;
    let mut marked = BTreeSet::new();
    let mut unbounded = false;
    let mut visit = |z: Complex64| {
        let v = h.eval(z);
        if !(v.norm() <= GROWTH_CAP) {
            unbounded = true;
        } else {
            marked.insert(cell_of(v, cell));
        }
    };
    visit(Complex64::new(0.0, 0.0));
    for i in 1..=n_r {
        // the last ring sits on the circle's inner edge, closing the image
        let r = if i == n_r { 1.0 - 1e-12 } else { i as f64 * step };
        let n_t = ((TAU * r / step).ceil() as usize).max(8);
        for k in 0..n_t {
            visit(Complex64::from_polar(r, k as f64 * TAU / n_t as f64));
        }
    }
    let set = EssentialRangeEstimate { cells: marked.into_iter().collect(), cell_size: cell, eps: step, threshold: 0.0 };
    Ok(SpectrumReport {
        mode: SpectrumMode::Analytic,
        set,
        note: "closure of the sampled image of the disk".into(),
        probes: Vec::new(),
        unbounded,
    })
}

// ---------------------------------------------------------------------------
// inequality harness

/// Inputs for one instance of a lemma inequality `lhs ≲ rhs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "lemma")]
pub enum HarnessInput {
    /// Arc double integral over `I` against the gradient integral over `S(3I)`.
    #[serde(rename = "EL")]
    Energy { f: BoundaryFunction, arc: ArcT, p: f64, s: f64 },
    /// Gradient integral over `S(I)` against the double integral over `J`
    /// plus the tail term, for concentric `J ⊇ 3I`.
    #[serde(rename = "StL")]
    Stegenga { f: BoundaryFunction, inner: ArcT, outer: ArcT, p: f64, s: f64 },
    /// The inner-function disk integral `J(a)` against the Möbius-weighted
    /// double integral, with a finite Blaschke product as the inner function.
    #[serde(rename = "LIn")]
    Inner { f: BoundaryFunction, zeros: Vec<DiskPoint>, a: DiskPoint, q: f64, r: f64 },
    /// `∫ |h|^p dμ` against `‖h‖^p_{B_p(s)}` (with `|h(0)|` added to make a norm).
    #[serde(rename = "LPZ")]
    Embedding { h: AnalyticFunction, measure: DiscretePointMeasure, p: f64, s: f64 },
    /// Mean oscillation on `I` against the arc functional to the power `1/p`.
    #[serde(rename = "BMO-inc")]
    BmoInclusion { f: BoundaryFunction, arc: ArcT, p: f64, s: f64 },
}

impl HarnessInput {
    pub fn lemma(&self) -> &'static str {
        match self {
            HarnessInput::Energy { .. } => "EL",
            HarnessInput::Stegenga { .. } => "StL",
            HarnessInput::Inner { .. } => "LIn",
            HarnessInput::Embedding { .. } => "LPZ",
            HarnessInput::BmoInclusion { .. } => "BMO-inc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnessResult {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, defined as 0 when `lhs = 0`.
    pub ratio: f64,
    pub converged: bool,
}

impl HarnessResult {
    fn new(lhs: f64, rhs: f64, converged: bool) -> Self {
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        HarnessResult { lhs, rhs, ratio, converged }
    }
}

/// `∫_{S(I)} |∇f̂|^p (1 - |z|²)^{p-2+s} dA`.
pub fn sector_gradient_integral(f: &BoundaryFunction, arc: &ArcT, p: f64, s: f64, q: &QuadratureSpec) -> (f64, bool) {
    let field = f.extension_field();
    let density = |z: Complex64| field.gradient_norm(z).powf(p);
    let est = DiskIntegral { density: &density, alpha: p - 2.0 + s, hints: field.hints() }.estimate(&DiskRegion::Sector(*arc), q);
    (est.value, est.converged)
}

/// `∫_{|t| ≥ |J|/3} |f(e^{i(t + θ₀)}) - f_J| dt / t²` over `|t| ≤ π`.
fn tail_term(f: &BoundaryFunction, outer: &ArcT) -> f64 {
    let lo = outer.length() / 3.0;
    if lo >= PI {
        return 0.0;
    }
    let avg = arc_average(f, outer);
    let c = outer.center();
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let breaks: Vec<f64> = lifted_breaks(&f.breakpoints(), c - PI, c + PI)
            .into_iter()
            .map(|b| sign * (b - c))
            .filter(|t| *t > lo && *t < PI)
            .collect();
        total += adaptive(|t| (f.eval(c + sign * t) - avg).norm() / (t * t), lo, PI, &breaks, 1e-10, 20_000).value;
    }
    total
}

/// `P[|f|^q]` as a coefficient series.
fn power_extension(f: &BoundaryFunction, q: f64) -> Result<FourierSeries> {
    if let (BoundaryFunction::Fourier(fs), true) = (f, q == 2.0) {
        return Ok(fs.abs_sq());
    }
    Ok(SampledGrid::from_fn(1024, |t| Complex64::new(f.eval(t).norm().powf(q), 0.0))?.to_fourier())
}

fn inner_sides(f: &BoundaryFunction, zeros: &[DiskPoint], a: DiskPoint, q: f64, r: f64, qs: &QuadratureSpec) -> Result<HarnessResult> {
    let b = BlaschkeProduct::new(zeros.to_vec());
    let ext = power_extension(f, q)?;
    let av = a.value();
    let mut hints: Vec<f64> = zeros.iter().filter(|z| z.norm() > 0.0).map(|z| z.arg()).collect();
    if a.norm() > 0.0 {
        hints.push(a.arg());
    }
    hints.extend(f.feature_angles());
    // (1-|S|)^q (1-|z|)^{-2} (1-|σ_a|)^r = [(1-|S|)/(1-|z|)]^q (1+|z|)^{2-q} (1-|σ_a|)^r (1-|z|²)^{q-2}
    let density = |z: Complex64| {
        let rz = z.norm();
        let one_minus_z = 1.0 - rz;
        if one_minus_z <= 0.0 {
            return 0.0;
        }
        let d_s2 = b.one_minus_modulus_sq(z).max(0.0);
        let d_s = d_s2 / (1.0 + (1.0 - d_s2).max(0.0).sqrt());
        let d_m2 = one_minus_mobius_sq_raw(av, z);
        let d_m = d_m2 / (1.0 + (1.0 - d_m2).max(0.0).sqrt());
        ext.extension(z).re.max(0.0) * (d_s / one_minus_z).powf(q) * (1.0 + rz).powf(2.0 - q) * d_m.powf(r)
    };
    let lhs = DiskIntegral { density: &density, alpha: q - 2.0, hints: hints.clone() }.estimate(&DiskRegion::Disk, qs);
    let h = AnalyticFunction::Blaschke(b.clone());
    let num = |x: f64, y: f64| {
        let fx = f.eval(x).norm().powf(q);
        let fy = f.eval(y).norm().powf(q);
        0.5 * (fx + fy) * (h.boundary_value(x) - h.boundary_value(y)).norm().powf(q)
    };
    let k = 1.0 - av.norm_sqr();
    let weight = |x: f64, y: f64| {
        let dx = (Complex64::from_polar(1.0, x) - av).norm();
        let dy = (Complex64::from_polar(1.0, y) - av).norm();
        (k / (dx * dy)).powf(r)
    };
    let rhs = SingularDouble { numerator: &num, weight: Some(&weight), s: r, hints }.estimate(&ArcT::full(), qs);
    Ok(HarnessResult::new(lhs.value, rhs.value, lhs.converged && rhs.converged))
}

pub fn inequality_harness(input: &HarnessInput, q: &QuadratureSpec) -> Result<HarnessResult> {
    q.validate()?;
    match input {
        HarnessInput::Energy { f, arc, p, s } => {
            SpaceParams::new(*p, *s)?;
            let lhs = crate::quadrature::arc_double_integral(f, arc, *p, *s, q)?;
            let big = arc.scaled(3.0).arc;
            let (rhs, ok) = sector_gradient_integral(f, &big, *p, *s, q);
            Ok(HarnessResult::new(lhs.value, rhs, lhs.converged && ok))
        }
        HarnessInput::Stegenga { f, inner, outer, p, s } => {
            SpaceParams::new(*p, *s)?;
            if angle_diff(inner.center(), outer.center()).abs() > 1e-12 {
                return Err(Error::Hypothesis("arcs must share a center".into()));
            }
            if outer.length() < 3.0 * inner.length() * (1.0 - 1e-12) {
                return Err(Error::Hypothesis(format!(
                    "outer arc length {} below three times {}",
                    outer.length(),
                    inner.length()
                )));
            }
            // the lemma weights by (1 - |z|)^{p-2+s}; convert from (1 - |z|²)
            let field = f.extension_field();
            let alpha = p - 2.0 + s;
            let density = |z: Complex64| field.gradient_norm(z).powf(*p) * (1.0 + z.norm()).powf(-alpha);
            let lhs = DiskIntegral { density: &density, alpha, hints: field.hints() }.estimate(&DiskRegion::Sector(*inner), q);
            let dbl = crate::quadrature::arc_double_integral(f, outer, *p, *s, q)?;
            let tail = tail_term(f, outer);
            let rhs = dbl.value + inner.length().powf(p + s) * tail.powf(*p);
            Ok(HarnessResult::new(lhs.value, rhs, lhs.converged && dbl.converged))
        }
        HarnessInput::Inner { f, zeros, a, q: qe, r } => {
            check(*qe > 1.0 && qe.is_finite(), || format!("q = {qe} must exceed 1"))?;
            check(*r > 0.0 && *r < 1.0, || format!("r = {r} outside (0, 1)"))?;
            if zeros.is_empty() {
                return Err(Error::Hypothesis("the inner function needs at least one zero".into()));
            }
            inner_sides(f, zeros, *a, *qe, *r, q)
        }
        HarnessInput::Embedding { h, measure, p, s } => {
            check(*p > 1.0, || format!("p = {p} must exceed 1"))?;
            check(*s > 0.0, || format!("s = {s} must be positive"))?;
            let test = log_carleson_sup(measure, *s, *p, CarlesonForm::Sector, &SupSearchSpec::default())?;
            if !test.bounded {
                return Err(Error::Hypothesis(format!(
                    "measure fails the logarithmic Carleson test (slope {:.3})",
                    test.slope
                )));
            }
            let lhs: f64 = measure.atoms().iter().map(|at| at.mass * h.eval(at.point.to_complex()).norm().powf(*p)).sum();
            let est = bp_s_integral(h, *p, *s, q)?;
            let norm = h.eval(Complex64::new(0.0, 0.0)).norm() + est.value.powf(1.0 / p);
            Ok(HarnessResult::new(lhs, norm.powf(*p), est.converged))
        }
        HarnessInput::BmoInclusion { f, arc, p, s } => {
            let params = SpaceParams::new(*p, *s)?;
            let lhs = mean_oscillation(f, arc, *p);
            let est = qps_arc_functional(f, arc, params, q)?;
            Ok(HarnessResult::new(lhs, est.value.powf(1.0 / p), est.converged))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleson::Atom;
    use crate::geometry::PolarPoint;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent transcription of the trichotomy, exact on the grid:
    /// exponents in quarters, smoothness in tenths.
    fn oracle(p1: i64, p2: i64, s: i64, r: i64) -> RegimeCase {
        if p1 <= p2 && s <= r {
            return RegimeCase::Case1NonTrivial;
        }
        if p1 > p2 && s <= r {
            if (10 - s) * p2 > (10 - r) * p1 {
                return RegimeCase::Case2NonTrivial;
            }
            return RegimeCase::Case2Trivial;
        }
        RegimeCase::Case3Trivial
    }

    #[test]
    fn regime_examples() {
        assert_eq!(classify_regime(2.0, 2.0, 0.5, 0.5).unwrap().case, RegimeCase::Case1NonTrivial);
        assert_eq!(classify_regime(3.0, 2.0, 0.2, 0.5).unwrap().case, RegimeCase::Case2NonTrivial);
        assert_eq!(classify_regime(2.0, 2.0, 0.6, 0.4).unwrap().case, RegimeCase::Case3Trivial);
        assert_eq!(classify_regime(3.0, 2.0, 0.4, 0.4).unwrap().case, RegimeCase::Case2Trivial);
        // exact tie in real arithmetic, inexact in floating point
        assert_eq!(classify_regime(2.0, 1.5, 0.2, 0.4).unwrap().case, RegimeCase::Case2Trivial);
        assert_eq!(classify_regime(2.0, 2.0, 0.5, 0.5).unwrap().characterization, "L∞ + log condition");
        assert!(classify_regime(1.0, 2.0, 0.5, 0.5).is_err());
        assert!(classify_regime(2.0, 2.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn regime_grid_matches_oracle() {
        let ps = [5, 6, 8, 12, 16];
        let mut seen = BTreeSet::new();
        for p1 in ps {
            for p2 in ps {
                for s in 1..=9 {
                    for r in 1..=9 {
                        let got =
                            classify_regime(p1 as f64 / 4.0, p2 as f64 / 4.0, s as f64 / 10.0, r as f64 / 10.0).unwrap().case;
                        assert_eq!(got, oracle(p1, p2, s, r), "{p1} {p2} {s} {r}");
                        seen.insert(got);
                    }
                }
            }
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn regime_json_tags() {
        let d = classify_regime(2.0, 2.0, 0.6, 0.4).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["case"], "Case3-Trivial");
    }

    fn two_valued(m: usize) -> SampledGrid {
        SampledGrid::from_fn(m, |t| if t < PI { c(1.0, 0.0) } else { c(0.0, 1.0) }).unwrap()
    }

    #[test]
    fn essential_range_examples() {
        let k = SampledGrid::from_fn(256, |_| c(5.0, 0.0)).unwrap();
        let e = essential_range_default(&k, 0.1).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e.contains_cell_of(c(5.0, 0.0)));
        let e = essential_range_default(&two_valued(1024), 0.05).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.contains_cell_of(c(1.0, 0.0)) && e.contains_cell_of(c(0.0, 1.0)));
        assert!(essential_range(&two_valued(64), 0.1, 0.05, 1.0 / 64.0).is_err());
    }

    #[test]
    fn essential_range_of_identity_is_a_ring() {
        let cell = 0.05;
        let g = SampledGrid::from_fn(4096, |t| Complex64::from_polar(1.0, t)).unwrap();
        let e = essential_range_default(&g, cell).unwrap();
        let centers = e.centers();
        for z in &centers {
            assert!((z.norm() - 1.0).abs() <= cell + e.eps);
        }
        for k in 0..360 {
            let w = Complex64::from_polar(1.0, k as f64 * TAU / 360.0);
            assert!(e.distance(w) <= cell + e.eps);
        }
    }

    #[test]
    fn isolated_samples_are_dropped() {
        let m = 1024;
        let g = SampledGrid::from_fn(m, |t| if t.abs() < 1e-9 { c(9.0, 9.0) } else { c(0.0, 0.0) }).unwrap();
        let e = essential_range_default(&g, 0.1).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e.contains_cell_of(c(0.0, 0.0)));
    }

    #[test]
    fn spectrum_analytic_examples() {
        let cell = 0.05;
        let k = spectrum_analytic(&AnalyticFunction::constant(c(0.3, 0.2)), cell).unwrap();
        assert_eq!(k.set.len(), 1);
        let id = spectrum_analytic(&AnalyticFunction::identity(), cell).unwrap();
        let sq = spectrum_analytic(&AnalyticFunction::Taylor(crate::functions::TaylorSeries::monomial(2)), cell).unwrap();
        assert_eq!(id.set.cells, sq.set.cells);
        for z in id.set.centers() {
            assert!(z.norm() - 1.0 <= 2.0 * cell);
        }
        for i in 0..50 {
            for j in 0..50 {
                let w = c(-1.0 + 2.0 * i as f64 / 49.0, -1.0 + 2.0 * j as f64 / 49.0);
                if w.norm() <= 1.0 {
                    assert!(id.set.distance(w) <= 2.0 * cell);
                }
            }
        }
        assert!(!id.unbounded);
    }

    #[test]
    fn spectrum_boundary_examples() {
        let search = SupSearchSpec::default();
        let q = QuadratureSpec::default();
        let params = SpaceParams::new(2.0, 0.5).unwrap();
        let k = spectrum_boundary(&BoundaryFunction::constant(c(2.0, -1.0)), params, &SpectrumGrid::default(), &search, &q).unwrap();
        assert_eq!(k.set.len(), 1);
        let f = BoundaryFunction::Fourier(FourierSeries::exp(1));
        let rep = spectrum_boundary(&f, params, &SpectrumGrid::default(), &search, &q).unwrap();
        assert!(rep.probes.iter().all(|p| p.passed));
        let origin = rep.probes.iter().find(|p| p.lambda == [0.0, 0.0]).unwrap();
        assert_relative_eq!(origin.sup_inverse, 1.0, max_relative = 1e-12);
        let step = BoundaryFunction::sign_step();
        assert!(matches!(
            spectrum_boundary(&step, params, &SpectrumGrid::default(), &search, &q),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn multiplier_examples() {
        let search = SupSearchSpec::default();
        let q = QuadratureSpec::default();
        let one = BoundaryFunction::constant(c(1.0, 0.0));
        assert_eq!(multiplier_check(&one, 2.0, 2.0, 0.5, 0.5, &search, &q).unwrap().verdict, Verdict::True);
        let e = BoundaryFunction::Fourier(FourierSeries::exp(1));
        let rep = multiplier_check(&e, 2.0, 2.0, 0.5, 0.5, &search, &q).unwrap();
        assert_eq!(rep.verdict, Verdict::True);
        assert_relative_eq!(rep.linf_bound, 1.0, max_relative = 1e-12);
        let trivial = multiplier_check(&e, 2.0, 2.0, 0.6, 0.4, &search, &q).unwrap();
        assert_eq!(trivial.verdict, Verdict::OnlyZero);
        assert!(trivial.log_condition.is_none());
        assert_relative_eq!(trivial.grid_p_mean, 1.0, max_relative = 1e-12);
        let step = BoundaryFunction::sign_step();
        assert_eq!(multiplier_check(&step, 2.0, 2.0, 0.5, 0.5, &search, &q).unwrap().verdict, Verdict::False);
    }

    #[test]
    fn harness_constant_is_zero() {
        let q = QuadratureSpec::default();
        let k = BoundaryFunction::constant(c(1.0, 0.0));
        let arc = ArcT::new(1.0, 0.5).unwrap();
        let r = inequality_harness(&HarnessInput::Energy { f: k.clone(), arc, p: 2.0, s: 0.5 }, &q).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, 0.0));
        let r = inequality_harness(&HarnessInput::BmoInclusion { f: k, arc, p: 2.0, s: 0.5 }, &q).unwrap();
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn harness_energy_and_bmo_on_cos() {
        let q = QuadratureSpec::default();
        let f = BoundaryFunction::Fourier(FourierSeries::cos(1));
        let mut max_el = 0.0f64;
        for k in 0..10 {
            let arc = ArcT::new(k as f64 * 0.61, 0.05 + 0.3 * k as f64).unwrap();
            let el = inequality_harness(&HarnessInput::Energy { f: f.clone(), arc, p: 2.0, s: 0.5 }, &q).unwrap();
            assert!(el.ratio.is_finite() && el.ratio > 0.0);
            max_el = max_el.max(el.ratio);
            let b = inequality_harness(&HarnessInput::BmoInclusion { f: f.clone(), arc, p: 2.0, s: 0.5 }, &q).unwrap();
            assert!(b.ratio <= 1.0 + 1e-9, "{b:?}");
        }
        assert!(max_el < 100.0);
    }

    #[test]
    fn harness_stegenga_hypotheses() {
        let q = QuadratureSpec::default();
        let f = BoundaryFunction::Fourier(FourierSeries::real_trig(&[0.0, 1.0], &[0.0, 0.0, 0.5]));
        let inner = ArcT::new(1.0, 0.2).unwrap();
        let bad = HarnessInput::Stegenga { f: f.clone(), inner, outer: ArcT::new(1.0, 0.5).unwrap(), p: 2.0, s: 0.5 };
        assert!(matches!(inequality_harness(&bad, &q), Err(Error::Hypothesis(_))));
        let off = HarnessInput::Stegenga { f: f.clone(), inner, outer: ArcT::new(1.1, 0.9).unwrap(), p: 2.0, s: 0.5 };
        assert!(matches!(inequality_harness(&off, &q), Err(Error::Hypothesis(_))));
        let ok = HarnessInput::Stegenga { f, inner, outer: ArcT::new(1.0, 0.6).unwrap(), p: 2.0, s: 0.5 };
        let r = inequality_harness(&ok, &q).unwrap();
        assert!(r.ratio > 0.0 && r.ratio < 100.0, "{r:?}");
    }

    #[test]
    fn harness_inner_at_origin() {
        let q = QuadratureSpec::default();
        let f = BoundaryFunction::Fourier(FourierSeries::real_trig(&[1.0, 0.5], &[]));
        let zeros = vec![DiskPoint::from_re_im(0.5, 0.0).unwrap(), DiskPoint::from_re_im(-0.2, 0.6).unwrap()];
        let r = inequality_harness(
            &HarnessInput::Inner { f: f.clone(), zeros: zeros.clone(), a: DiskPoint::origin(), q: 2.0, r: 0.5 },
            &q,
        )
        .unwrap();
        assert!(r.lhs > 0.0 && r.rhs > 0.0 && r.ratio < 100.0, "{r:?}");
        let none = HarnessInput::Inner { f, zeros: vec![], a: DiskPoint::origin(), q: 2.0, r: 0.5 };
        assert!(inequality_harness(&none, &q).is_err());
    }

    #[test]
    fn harness_embedding() {
        let q = QuadratureSpec::default();
        let (p, s) = (2.0, 0.5);
        // sector ratio of the atom at depth h on its own scale decays like 1/k
        let atoms = (4..30)
            .map(|k| {
                let h = 0.5f64.powi(k);
                let len = TAU * h;
                let mass = len.powf(s) * (2.0 / len).ln().powf(-p) / k as f64;
                Atom { point: PolarPoint::new(h, 0.7 * k as f64).unwrap(), mass }
            })
            .collect();
        let mu = DiscretePointMeasure::new(atoms).unwrap();
        let r = inequality_harness(&HarnessInput::Embedding { h: AnalyticFunction::identity(), measure: mu.clone(), p, s }, &q).unwrap();
        let lhs: f64 = mu.atoms().iter().map(|a| a.mass * a.point.modulus().powi(2)).sum();
        assert_relative_eq!(r.lhs, lhs, max_relative = 1e-12);
        assert_relative_eq!(r.rhs, PI / (p - 1.0 + s), max_relative = 1e-6);
        // heavy atoms violate the hypothesis
        let heavy = DiscretePointMeasure::new(
            (1..30).map(|k| Atom { point: PolarPoint::new(0.5f64.powi(k), 0.7 * k as f64).unwrap(), mass: 1.0 }).collect(),
        )
        .unwrap();
        let bad = HarnessInput::Embedding { h: AnalyticFunction::identity(), measure: heavy, p, s };
        assert!(matches!(inequality_harness(&bad, &q), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn blaschke_boundary_range_is_the_circle() {
        let zeros: Vec<DiskPoint> = (0..10)
            .map(|k| DiskPoint::from_polar(0.3 + 0.06 * k as f64, 0.9 * k as f64).unwrap())
            .collect();
        let h = AnalyticFunction::Blaschke(BlaschkeProduct::new(zeros));
        let g = SampledGrid::from_fn(4096, |t| h.boundary_value(t)).unwrap();
        let cell = 0.05;
        let e = essential_range_default(&g, cell).unwrap();
        for z in e.centers() {
            assert!((z.norm() - 1.0).abs() <= cell);
        }
    }
}
