//! The acceptance experiments. Each returns a [`CriterionResult`]; the CLI's
//! `suite` command and the `acceptance` test target both run them.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::carleson::{carleson_trend, gradient_carleson, trend_bounded};
use crate::constructions::{
    critical_r, kc_sequence, lacunary_g_coefficients, lacunary_h_coefficients, log_test_function, KCParams,
};
use crate::functions::{rademacher_moment, AnalyticFunction, BlaschkeProduct, BoundaryFunction, FourierSeries, SampledGrid};
use crate::geometry::{one_minus_mobius_sq, ArcT, DiskPoint, MobiusMap};
use crate::multipliers::{
    classify_regime, essential_range_default, inequality_harness, multiplier_check, spectrum_analytic, HarnessInput,
    RegimeCase, Verdict,
};
use crate::quadrature::QuadratureSpec;
use crate::search::SupSearchSpec;
use crate::seminorms::{
    bloch_norm, bmo_norm, bp_s_norm, carleson_gradient_form, lacunary_qps_proxy, log_weighted_seminorm,
    qps_boundary_seminorm, qps_disk_seminorm, qps_mobius_form, SpaceParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub search: SupSearchSpec,
    pub quadrature: QuadratureSpec,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { search: SupSearchSpec::default(), quadrature: QuadratureSpec::default(), seed: 20240917 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Wall time; left out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>7.1}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub const CRITERIA: [(u32, &str); 13] = [
    (1, "mobius-algebra"),
    (2, "zero-seminorms"),
    (3, "bp-closed-form"),
    (4, "mobius-invariance"),
    (5, "form-equivalence"),
    (6, "energy-inequality"),
    (7, "tangential-blaschke-trend"),
    (8, "lacunary-counterexamples"),
    (9, "khinchine-bracket"),
    (10, "regime-classifier"),
    (11, "multiplier-condition"),
    (12, "spectra"),
    (13, "log-kernel-uniformity"),
];

pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1).to_string();
    let start = Instant::now();
    let outcome = match id {
        1 => mobius_algebra(cfg),
        2 => zero_seminorms(cfg),
        3 => bp_closed_form(cfg),
        4 => mobius_invariance(cfg),
        5 => form_equivalence(cfg),
        6 => energy_inequality(cfg),
        7 => tangential_trend(),
        8 => lacunary_counterexamples(cfg),
        9 => khinchine(cfg),
        10 => regime_grid(),
        11 => multiplier_condition(cfg),
        12 => spectra(),
        13 => log_kernel_uniformity(cfg),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match outcome {
        Ok((p, d)) => (p, d),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(cfg: &SuiteConfig, mut each: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|(id, _)| {
            let r = run_criterion(*id, cfg);
            each(&r);
            r
        })
        .collect()
}

type Outcome = std::result::Result<(bool, String), String>;

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_point(rng: &mut ChaCha8Rng, rmax: f64) -> DiskPoint {
    let r = rmax * rng.gen::<f64>().sqrt();
    DiskPoint::from_polar(r, rng.gen_range(0.0..TAU)).unwrap()
}

/// Real trigonometric polynomial of degree `deg` with coefficients decaying like `1/n`.
fn random_trig(rng: &mut ChaCha8Rng, deg: usize) -> BoundaryFunction {
    let mut cos = vec![0.0];
    let mut sin = vec![0.0];
    for n in 1..=deg {
        cos.push(rng.gen_range(-1.0..1.0) / n as f64);
        sin.push(rng.gen_range(-1.0..1.0) / n as f64);
    }
    BoundaryFunction::Fourier(FourierSeries::real_trig(&cos, &sin))
}

fn mobius_algebra(cfg: &SuiteConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut inv, mut ident) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let a = random_point(&mut rng, 0.99);
        let z = random_point(&mut rng, 0.99);
        let m = MobiusMap::new(a);
        let w = m.eval(z.value());
        inv = inv.max((m.eval(w) - z.value()).norm());
        ident = ident.max(((1.0 - w.norm_sqr()) - one_minus_mobius_sq(a, z)).abs());
    }
    Ok((inv < 1e-12 && ident < 1e-12, format!("max involution error {inv:.1e}, identity error {ident:.1e}")))
}

fn zero_seminorms(cfg: &SuiteConfig) -> Outcome {
    let (s, q) = (&cfg.search, &cfg.quadrature);
    let params = SpaceParams::new(2.0, 0.5).map_err(err)?;
    let f = BoundaryFunction::constant(c(1.5, -0.5));
    let h = AnalyticFunction::constant(c(1.5, -0.5));
    let values = [
        ("boundary", qps_boundary_seminorm(&f, params, s, q).map_err(err)?.value),
        ("mobius", qps_mobius_form(&f, params, s, q).map_err(err)?.value),
        ("gradient", carleson_gradient_form(&f, params, s, q).map_err(err)?.value),
        ("log", log_weighted_seminorm(&f, 2.0, 0.5, s, q).map_err(err)?.value),
        ("bmo", bmo_norm(&f, 2.0, s).map_err(err)?),
        ("bp", bp_s_norm(&h, 2.0, 0.5, q).map_err(err)?),
        ("disk", qps_disk_seminorm(&h, params, s, q).map_err(err)?.value),
        ("bloch", bloch_norm(&h, q)),
        ("lacunary", lacunary_qps_proxy(&[c(0.0, 0.0); 8], 2.0, 0.5).value),
    ];
    let worst = values.iter().map(|v| v.1).fold(0.0, f64::max);
    Ok((worst < 1e-8, format!("max over {} seminorms {worst:.1e}", values.len())))
}

fn bp_closed_form(cfg: &SuiteConfig) -> Outcome {
    let mut worst = 0.0f64;
    for p in [1.5, 2.0, 3.0] {
        for s in [0.2, 0.5, 0.8] {
            let v = bp_s_norm(&AnalyticFunction::identity(), p, s, &cfg.quadrature).map_err(err)?.powf(p);
            worst = worst.max((v / (PI / (p - 1.0 + s)) - 1.0).abs());
        }
    }
    Ok((worst < 5e-3, format!("max relative error {worst:.1e} over 9 pairs")))
}

fn mobius_invariance(cfg: &SuiteConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 4);
    let params = SpaceParams::new(2.0, 0.5).map_err(err)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in 0..5 {
        let f = random_trig(&mut rng, 1 + k % 3);
        let base = qps_mobius_form(&f, params, &cfg.search, &cfg.quadrature).map_err(err)?.value;
        for _ in 0..6 {
            let a = random_point(&mut rng, 0.5);
            let g = f.compose_mobius(a);
            let v = qps_mobius_form(&g, params, &cfg.search, &cfg.quadrature).map_err(err)?.value;
            lo = lo.min(v / base);
            hi = hi.max(v / base);
        }
    }
    Ok((lo >= 0.85 && hi <= 1.18, format!("ratio range [{lo:.4}, {hi:.4}] over 30 compositions")))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    for (rank, i) in idx.into_iter().enumerate() {
        r[i] = rank as f64;
    }
    r
}

/// Spearman rank correlation (no ties expected for continuous data).
pub fn rank_correlation(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn form_equivalence(cfg: &SuiteConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
    let params = SpaceParams::new(2.0, 0.5).map_err(err)?;
    let (mut a, mut b, mut cc) = (vec![], vec![], vec![]);
    for _ in 0..20 {
        let deg = rng.gen_range(1..=8);
        let f = random_trig(&mut rng, deg);
        a.push(qps_boundary_seminorm(&f, params, &cfg.search, &cfg.quadrature).map_err(err)?.value);
        b.push(carleson_gradient_form(&f, params, &cfg.search, &cfg.quadrature).map_err(err)?.value);
        cc.push(qps_mobius_form(&f, params, &cfg.search, &cfg.quadrature).map_err(err)?.value);
    }
    let spread = |x: &[f64], y: &[f64]| {
        let r: Vec<f64> = x.iter().zip(y).map(|(u, v)| u / v).collect();
        r.iter().copied().fold(0.0, f64::max) / r.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let spreads = [spread(&b, &a), spread(&cc, &a), spread(&cc, &b)];
    let corr = [rank_correlation(&a, &b), rank_correlation(&a, &cc), rank_correlation(&b, &cc)];
    let ok = spreads.iter().all(|s| *s < 1e3) && corr.iter().all(|r| *r >= 0.9);
    Ok((
        ok,
        format!(
            "spreads {:.2}/{:.2}/{:.2}, rank correlations {:.3}/{:.3}/{:.3}",
            spreads[0], spreads[1], spreads[2], corr[0], corr[1], corr[2]
        ),
    ))
}

fn energy_inequality(cfg: &SuiteConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 6);
    let mut inputs = Vec::new();
    for _ in 0..50 {
        let deg = rng.gen_range(1..=6);
        let f = random_trig(&mut rng, deg);
        let len = TAU * 2f64.powf(-rng.gen_range(1.0..7.0));
        let arc = ArcT::new(rng.gen_range(0.0..TAU), len).unwrap();
        inputs.push(HarnessInput::Energy { f, arc, p: 2.0, s: 0.5 });
    }
    let constant = |q: &QuadratureSpec| -> std::result::Result<f64, String> {
        let mut best = 0.0f64;
        for i in &inputs {
            best = best.max(inequality_harness(i, q).map_err(err)?.ratio);
        }
        Ok(best)
    };
    let c1 = constant(&cfg.quadrature)?;
    let c2 = constant(&cfg.quadrature.refined())?;
    let drift = (c2 / c1 - 1.0).abs();
    Ok((c1.is_finite() && c1 > 0.0 && drift <= 0.2, format!("C = {c1:.4}, refined {c2:.4}, drift {:.2}%", 100.0 * drift)))
}

fn tangential_trend() -> Outcome {
    let params = KCParams::new(0.8, 0.4, 0.5, 0.3, 0.0, 100_000).map_err(err)?;
    let seq = kc_sequence(&params);
    let levels: Vec<usize> = (4..=13).collect();
    let mut parts = Vec::new();
    let mut ok = true;
    for (gamma, want_bounded) in [(params.s, true), (params.r, false)] {
        let mu = seq.zero_measure(gamma).map_err(err)?;
        let slope = carleson_trend(&mu, gamma, mu.trend_angle(), &levels).map_err(err)?;
        let want = params.predicted_slope(gamma);
        ok &= (slope - want).abs() <= 0.1 * want.abs() && trend_bounded(slope) == want_bounded;
        parts.push(format!("γ={gamma}: slope {slope:.4} (predicted {want:.4})"));
    }
    Ok((ok, parts.join(", ")))
}

fn lacunary_counterexamples(cfg: &SuiteConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 8);
    let mut draws = 0;
    let mut ok = true;
    while draws < 5 {
        let p1 = rng.gen_range(1.5..4.0);
        let p2 = rng.gen_range(1.5..4.0);
        let s = rng.gen_range(0.05..0.95);
        let r = rng.gen_range(0.05..0.95);
        let gap = (1.0 - r) / p2 - (1.0 - s) / p1;
        // the convergent proxy's ratio must be clearly below 1 at 40 terms
        if gap * p1 / 2.0 < 0.1 {
            continue;
        }
        draws += 1;
        let (coeffs, _) = lacunary_g_coefficients(p1, p2, s, r, 40).map_err(err)?;
        let fin = lacunary_qps_proxy(&coeffs, p1, s);
        let div = lacunary_qps_proxy(&coeffs, p2, r);
        let q = 2f64.powf(-gap * p1 / 2.0);
        let closed = (1.0 - q.powi(40)) / (1.0 - q);
        ok &= !fin.divergent && (fin.value / closed - 1.0).abs() < 1e-9 && div.divergent;
    }
    let (p1, p2, s) = (3.0, 2.0, 0.4);
    let r = critical_r(p1, p2, s);
    let k = 200;
    let coeffs = lacunary_h_coefficients(p1, p2, s, k).map_err(err)?;
    let prox = lacunary_qps_proxy(&coeffs, p2, r);
    let partial = |n: usize| prox.terms[..=n].iter().sum::<f64>();
    let track = partial(k) / (k as f64).ln();
    // harmonic growth: doubling K adds log 2
    let inc = (partial(k) - partial(k / 2)) / std::f64::consts::LN_2;
    ok &= (track - 1.0).abs() <= 0.15 && (inc - 1.0).abs() <= 0.05 && prox.divergent;
    ok &= !lacunary_qps_proxy(&coeffs, p1, s).divergent;
    Ok((ok, format!("5 g-draws separated; h partial sum / log K = {track:.3}, doubling increment / log 2 = {inc:.3}")))
}

/// Sharp Khinchine constants for real coefficients: lower for `p < 2`, upper for `p > 2`.
fn khinchine_constants(p: f64) -> (f64, f64) {
    let lower = if p >= 2.0 { 1.0 } else if p == 1.0 { std::f64::consts::FRAC_1_SQRT_2 } else { 2f64.powf(0.5 - 1.0 / p) };
    let upper = if p <= 2.0 {
        1.0
    } else {
        // √2 (Γ((p+1)/2) / √π)^{1/p}; exact for the integer exponents used here
        let gamma_half = match p as u32 {
            3 => 1.0,
            4 => 0.75 * PI.sqrt(),
            _ => f64::NAN,
        };
        2f64.sqrt() * (gamma_half / PI.sqrt()).powf(1.0 / p)
    };
    (lower, upper)
}

fn khinchine(cfg: &SuiteConfig) -> Outcome {
    let vectors: [Vec<f64>; 3] = [
        vec![1.0; 8],
        (1..=12).map(|k| 1.0 / k as f64).collect(),
        vec![3.0, -1.0, 0.5, 2.0, -0.25, 0.0, 1.5],
    ];
    let mut worst = (f64::INFINITY, 0.0f64);
    let mut ok = true;
    for (i, v) in vectors.iter().enumerate() {
        let coeffs: Vec<Complex64> = v.iter().map(|x| c(*x, 0.0)).collect();
        let l2 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for p in [1.0, 2.0, 3.0, 4.0] {
            let m = rademacher_moment(&coeffs, p, 10_000, cfg.seed + 10 * i as u64 + p as u64).powf(1.0 / p) / l2;
            let (a, b) = khinchine_constants(p);
            // Monte-Carlo slack
            ok &= m >= a * 0.97 && m <= b * 1.03;
            worst = (worst.0.min(m / a), worst.1.max(m / b));
        }
    }
    Ok((ok, format!("min moment/A_p {:.3}, max moment/B_p {:.3}", worst.0, worst.1)))
}

/// Independent transcription of the trichotomy in exact integer arithmetic:
/// exponents are given in quarters and smoothness indices in tenths.
fn regime_oracle(p1q: i64, p2q: i64, s10: i64, r10: i64) -> RegimeCase {
    if s10 > r10 {
        return RegimeCase::Case3Trivial;
    }
    if p1q <= p2q {
        return RegimeCase::Case1NonTrivial;
    }
    if (10 - s10) * p2q > (10 - r10) * p1q {
        RegimeCase::Case2NonTrivial
    } else {
        RegimeCase::Case2Trivial
    }
}

fn regime_grid() -> Outcome {
    let quarters = [5i64, 6, 8, 12, 16];
    let (mut total, mut mismatches) = (0, 0);
    for &p1 in &quarters {
        for &p2 in &quarters {
            for s in 1..=9i64 {
                for r in 1..=9i64 {
                    total += 1;
                    let got = classify_regime(p1 as f64 / 4.0, p2 as f64 / 4.0, s as f64 / 10.0, r as f64 / 10.0)
                        .map_err(err)?
                        .case;
                    if got != regime_oracle(p1, p2, s, r) {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    Ok((mismatches == 0, format!("{mismatches} mismatches in {total} cases")))
}

fn multiplier_condition(cfg: &SuiteConfig) -> Outcome {
    let (s, q) = (&cfg.search, &cfg.quadrature);
    let smooth = BoundaryFunction::Fourier(FourierSeries::exp(1));
    let step = BoundaryFunction::sign_step();
    let a = multiplier_check(&smooth, 2.0, 2.0, 0.5, 0.5, s, q).map_err(err)?;
    let b = multiplier_check(&step, 2.0, 2.0, 0.5, 0.5, s, q).map_err(err)?;
    let ga = gradient_carleson(&smooth, 2.0, 0.5, 2.0, s, q).map_err(err)?;
    let gb = gradient_carleson(&step, 2.0, 0.5, 2.0, s, q).map_err(err)?;
    let step_flagged = b.log_condition.as_ref().is_some_and(|r| r.divergent);
    let ok = a.verdict == Verdict::True && b.verdict == Verdict::False && step_flagged && ga.bounded && !gb.bounded;
    Ok((
        ok,
        format!(
            "smooth {:?} (gradient slope {:.3}), step {:?} (gradient slope {:.3})",
            a.verdict, ga.slope, b.verdict, gb.slope
        ),
    ))
}

fn spectra() -> Outcome {
    let cell = 0.05;
    let two = SampledGrid::from_fn(4096, |t| if t < PI { c(1.0, 0.0) } else { c(0.0, 1.0) }).map_err(err)?;
    let e = essential_range_default(&two, cell).map_err(err)?;
    let two_ok = e.len() == 2;
    let id = spectrum_analytic(&AnalyticFunction::identity(), cell).map_err(err)?;
    // Hausdorff distance between the cell centers and the closed disk, on a dense probe grid
    let outward = id.set.centers().iter().map(|z| (z.norm() - 1.0).max(0.0)).fold(0.0, f64::max);
    let mut inward = 0.0f64;
    for i in 0..=100 {
        for j in 0..=100 {
            let w = c(-1.0 + 0.02 * i as f64, -1.0 + 0.02 * j as f64);
            if w.norm() <= 1.0 {
                inward = inward.max(id.set.distance(w));
            }
        }
    }
    let haus = outward.max(inward);
    let zeros: Vec<DiskPoint> = (0..10)
        .map(|k| DiskPoint::from_polar(0.2 + 0.07 * k as f64, 2.3 * k as f64).unwrap())
        .collect();
    let b = AnalyticFunction::Blaschke(BlaschkeProduct::new(zeros));
    let g = SampledGrid::from_fn(4096, |t| b.boundary_value(t)).map_err(err)?;
    let eb = essential_range_default(&g, cell).map_err(err)?;
    let shell = eb.centers().iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let ok = two_ok && haus <= 2.0 * cell && shell <= cell;
    Ok((ok, format!("step cells {}, disk Hausdorff {haus:.4}, Blaschke shell {shell:.4} (cell {cell})", e.len())))
}

fn log_kernel_uniformity(cfg: &SuiteConfig) -> Outcome {
    let params = SpaceParams::new(2.0, 0.5).map_err(err)?;
    let mut norms = Vec::new();
    for w in [0.0, 0.5, 0.9, 0.99] {
        let g = log_test_function(DiskPoint::from_re_im(w, 0.0).map_err(err)?);
        let semi = qps_disk_seminorm(&g, params, &cfg.search, &cfg.quadrature).map_err(err)?.value;
        norms.push(g.eval(c(0.0, 0.0)).norm() + semi.powf(1.0 / params.p));
    }
    let ratio = norms.iter().copied().fold(0.0, f64::max) / norms.iter().copied().fold(f64::INFINITY, f64::min);
    let list: Vec<String> = norms.iter().map(|v| format!("{v:.3}")).collect();
    Ok((ratio < 10.0, format!("norms [{}], max/min {ratio:.3}", list.join(", "))))
}
