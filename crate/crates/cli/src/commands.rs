use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64;
use qspace::carleson::{carleson_trend, log_carleson_sup, trend_bounded, CarlesonForm, CarlesonReport};
use qspace::constructions::{
    kc_sequence, lacunary_g_coefficients, lacunary_h_coefficients, log_test_function, rademacher_randomization,
    zero_set_sequence, KCParams, PointSequence,
};
use qspace::functions::{AnalyticFunction, LacunarySeries};
use qspace::geometry::DiskPoint;
use qspace::multipliers::{
    classify_regime, inequality_harness, multiplier_check, spectrum_analytic, spectrum_boundary, HarnessInput,
    HarnessResult, RegimeDecision, SpectrumGrid,
};
use qspace::seminorms::{
    bloch_norm, bmo_norm, bp_s_integral, carleson_gradient_form, lacunary_qps_proxy, log_weighted_seminorm,
    qps_boundary_seminorm, qps_disk_seminorm, qps_mobius_form, SeminormReport, SpaceParams,
};
use qspace::suite::{run_criterion, SuiteConfig, CRITERIA};
use serde::Serialize;
use serde_json::json;

use crate::config::Settings;
use crate::io::{self, MeasureFile};
use crate::{
    CarlesonArgs, CliError, Command, ConstructArgs, ConstructKind, FormArg, ModeArg, MultiplierArgs, RegimeArgs,
    SeminormArgs, SeminormKind, SpectrumArgs, SuiteArgs, VerifyArgs,
};

pub fn run(command: &Command, cfg: &Settings) -> Result<(), CliError> {
    match command {
        Command::Seminorm(a) => seminorm(a, cfg),
        Command::Carleson(a) => carleson(a, cfg),
        Command::Construct(a) => construct(a, cfg),
        Command::Regime(a) => regime(a, cfg),
        Command::Multiplier(a) => multiplier(a, cfg),
        Command::Spectrum(a) => spectrum(a, cfg),
        Command::Verify(a) => verify(a, cfg),
        Command::Suite(a) => suite(a, cfg),
    }
}

fn lib(e: qspace::Error) -> CliError {
    CliError::config(e)
}

fn need<'a>(flag: &'a Option<PathBuf>, fallback: &'a Option<PathBuf>, name: &str) -> Result<&'a PathBuf, CliError> {
    flag.as_ref().or(fallback.as_ref()).ok_or_else(|| CliError::Config(format!("missing --{name}")))
}

fn value<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing --{name}")))
}

fn demand(cfg: &Settings, ok: bool, what: &str) -> Result<(), CliError> {
    if cfg.require_convergence && !ok {
        return Err(CliError::NotConverged(what.to_string()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SeminormOut<'a> {
    kind: &'a str,
    p: f64,
    s: f64,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<SeminormReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<f64>,
    converged: bool,
}

fn seminorm(a: &SeminormArgs, cfg: &Settings) -> Result<(), CliError> {
    let path = need(&a.f, &cfg.inputs.f, "f")?;
    let file = io::read_function(path)?;
    let params = SpaceParams::new(a.p.unwrap_or(cfg.params.p), a.s.unwrap_or(cfg.params.s)).map_err(lib)?;
    let (search, q) = (&cfg.search, &cfg.quadrature);
    let kind = format!("{:?}", a.kind);
    let from_report = |r: SeminormReport| {
        let converged = r.converged && r.quadrature_converged;
        SeminormOut { kind: &kind, p: params.p, s: params.s, value: r.value, report: Some(r), error: None, converged }
    };
    let plain = |value: f64, error: Option<f64>, converged: bool| SeminormOut {
        kind: &kind,
        p: params.p,
        s: params.s,
        value,
        report: None,
        error,
        converged,
    };
    let out = match a.kind {
        SeminormKind::QpsBoundary => from_report(qps_boundary_seminorm(&file.boundary(), params, search, q).map_err(lib)?),
        SeminormKind::LogWeighted => {
            from_report(log_weighted_seminorm(&file.boundary(), params.p, params.s, search, q).map_err(lib)?)
        }
        SeminormKind::Mobius => from_report(qps_mobius_form(&file.boundary(), params, search, q).map_err(lib)?),
        SeminormKind::Gradient => from_report(carleson_gradient_form(&file.boundary(), params, search, q).map_err(lib)?),
        SeminormKind::Bmo => plain(bmo_norm(&file.boundary(), params.p, search).map_err(lib)?, None, true),
        SeminormKind::Bp => {
            let h = file.analytic("bp")?;
            let est = bp_s_integral(&h, params.p, params.s, q).map_err(lib)?;
            let norm = est.value.max(0.0).powf(1.0 / params.p);
            plain(norm, Some(est.error), est.converged)
        }
        SeminormKind::Disk => from_report(qps_disk_seminorm(&file.analytic("disk")?, params, search, q).map_err(lib)?),
        SeminormKind::Bloch => plain(bloch_norm(&file.analytic("bloch")?, q), None, true),
        SeminormKind::LacunaryProxy => {
            let coeffs = match file.analytic("lacunary-proxy")? {
                AnalyticFunction::Lacunary(l) => l.coeffs,
                _ => return Err(CliError::Config("lacunary-proxy needs a lacunary series".into())),
            };
            let proxy = lacunary_qps_proxy(&coeffs, params.p, params.s);
            io::emit_csv(cfg.out.as_ref(), "seminorm_terms.csv", &["k", "value"], io::profile_rows(&proxy.terms))?;
            plain(proxy.value, None, !proxy.divergent)
        }
    };
    if let Some(r) = &out.report {
        io::emit_csv(cfg.out.as_ref(), "seminorm_profile.csv", &["level", "value"], io::profile_rows(&r.profile))?;
    }
    let converged = out.converged;
    io::emit_report(cfg.out.as_ref(), "seminorm", &out)?;
    demand(cfg, converged, "seminorm profile or quadrature")
}

#[derive(Serialize)]
struct CarlesonEntry {
    exponent: f64,
    sup: CarlesonReport,
    trend_levels: [usize; 2],
    trend_slope: Option<f64>,
    bounded: bool,
}

fn carleson(a: &CarlesonArgs, cfg: &Settings) -> Result<(), CliError> {
    let path = need(&a.measure, &cfg.inputs.measure, "measure")?;
    let file = io::read_measure(path)?;
    let exponents = if a.exponent_pair.is_empty() { vec![cfg.params.s] } else { a.exponent_pair.clone() };
    let form = match a.form {
        FormArg::Sector => CarlesonForm::Sector,
        FormArg::Mobius => CarlesonForm::Mobius,
    };
    let (lo, hi) = (a.trend_levels[0], a.trend_levels[1]);
    if lo >= hi {
        return Err(CliError::Config(format!("trend levels {lo}..{hi} are empty")));
    }
    let levels: Vec<usize> = (lo..=hi).collect();
    let mut entries = Vec::new();
    for &gamma in &exponents {
        let mu = match &file {
            MeasureFile::Atoms(mu) => mu.clone(),
            MeasureFile::Sequence(seq) => seq.zero_measure(gamma).map_err(lib)?,
        };
        let sup = log_carleson_sup(&mu, gamma, a.alpha, form, &cfg.search).map_err(lib)?;
        // trend at the accumulation point only when one is known and there is no log weight
        let trend_slope = match mu.accumulation_angle {
            Some(theta) if a.alpha == 0.0 => Some(carleson_trend(&mu, gamma, theta, &levels).map_err(lib)?),
            _ => None,
        };
        let bounded = trend_slope.map_or(sup.bounded, trend_bounded);
        io::emit_csv(
            cfg.out.as_ref(),
            &format!("carleson_profile_{gamma}.csv"),
            &["level", "value"],
            io::profile_rows(&sup.profile),
        )?;
        entries.push(CarlesonEntry { exponent: gamma, sup, trend_levels: [lo, hi], trend_slope, bounded });
    }
    io::emit_report(cfg.out.as_ref(), "carleson", json!({ "form": format!("{:?}", a.form), "alpha": a.alpha, "results": entries }))
}

fn sequence_rows(seq: &PointSequence) -> Vec<Vec<String>> {
    seq.points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let z = p.to_complex();
            vec![k.to_string(), z.re.to_string(), z.im.to_string()]
        })
        .collect()
}

fn coefficient_rows(c: &[Complex64]) -> Vec<Vec<String>> {
    c.iter().enumerate().map(|(k, z)| vec![k.to_string(), z.re.to_string(), z.im.to_string()]).collect()
}

/// A lacunary series when it fits, otherwise the bare coefficient list.
fn lacunary_body(coeffs: Vec<Complex64>) -> serde_json::Value {
    if coeffs.len() <= LacunarySeries::MAX_TERMS {
        let series = LacunarySeries::new(coeffs).expect("within the term cap");
        serde_json::to_value(AnalyticFunction::Lacunary(series)).expect("serializable")
    } else {
        let pairs: Vec<[f64; 2]> = coeffs.iter().map(|z| [z.re, z.im]).collect();
        json!({ "coefficients": pairs })
    }
}

fn construct(a: &ConstructArgs, cfg: &Settings) -> Result<(), CliError> {
    let out = cfg.out.as_ref();
    let header = ["k", "re", "im"];
    let body = match a.kind {
        ConstructKind::Kc => {
            let params = KCParams::new(
                value(a.s, "s")?,
                value(a.r, "r")?,
                value(a.t, "t")?,
                value(a.eps, "eps")?,
                a.theta,
                a.count.unwrap_or(100_000),
            )
            .map_err(lib)?;
            let seq = kc_sequence(&params);
            io::emit_csv(out, "construct.csv", &header, sequence_rows(&seq))?;
            serde_json::to_value(&seq).expect("serializable")
        }
        ConstructKind::ZeroSet => {
            let seq = zero_set_sequence(value(a.t, "t")?, a.count.unwrap_or(1000)).map_err(lib)?;
            io::emit_csv(out, "construct.csv", &header, sequence_rows(&seq))?;
            serde_json::to_value(&seq).expect("serializable")
        }
        ConstructKind::LacunaryG => {
            let (coeffs, warning) = lacunary_g_coefficients(
                value(a.p1, "p1")?,
                value(a.p2, "p2")?,
                value(a.s, "s")?,
                value(a.r, "r")?,
                a.count.unwrap_or(40),
            )
            .map_err(lib)?;
            if let Some(w) = &warning {
                eprintln!("qspace: warning: {w}");
            }
            io::emit_csv(out, "construct.csv", &header, coefficient_rows(&coeffs))?;
            let mut v = lacunary_body(coeffs);
            if let (Some(w), Some(m)) = (warning, v.as_object_mut()) {
                m.insert("warning".into(), w.into());
            }
            v
        }
        ConstructKind::LacunaryH => {
            let coeffs =
                lacunary_h_coefficients(value(a.p1, "p1")?, value(a.p2, "p2")?, value(a.s, "s")?, a.count.unwrap_or(40))
                    .map_err(lib)?;
            io::emit_csv(out, "construct.csv", &header, coefficient_rows(&coeffs))?;
            lacunary_body(coeffs)
        }
        ConstructKind::LogTest => {
            let w = a.w.as_deref().ok_or_else(|| CliError::Config("missing --w RE IM".into()))?;
            let point = DiskPoint::from_re_im(w[0], w[1]).map_err(lib)?;
            serde_json::to_value(log_test_function(point)).expect("serializable")
        }
        ConstructKind::Randomization => {
            let path = need(&a.f, &cfg.inputs.f, "f")?;
            let coeffs = match io::read_function(path)?.analytic("randomization")? {
                AnalyticFunction::Lacunary(l) => l.coeffs,
                _ => return Err(CliError::Config("randomization needs a lacunary series".into())),
            };
            let series = rademacher_randomization(&coeffs, value(a.t, "t")?).map_err(lib)?;
            io::emit_csv(out, "construct.csv", &header, coefficient_rows(&series.coeffs))?;
            serde_json::to_value(AnalyticFunction::Lacunary(series)).expect("serializable")
        }
    };
    io::emit_report(out, "construct", json!({ "kind": format!("{:?}", a.kind), "construction": body }))
}

#[derive(Serialize)]
struct RegimeRow {
    p1: f64,
    p2: f64,
    s: f64,
    r: f64,
    case: String,
}

fn regime(a: &RegimeArgs, cfg: &Settings) -> Result<(), CliError> {
    let out = cfg.out.as_ref();
    match a.grid.as_deref() {
        Some("default") => {
            let ps = [1.25, 1.5, 2.0, 3.0, 4.0];
            let mut rows = Vec::new();
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for p1 in ps {
                for p2 in ps {
                    for s in (1..=9).map(|k| k as f64 / 10.0) {
                        for r in (1..=9).map(|k| k as f64 / 10.0) {
                            let d = classify_regime(p1, p2, s, r).map_err(lib)?;
                            let case = d.case.tag().to_string();
                            *counts.entry(case.clone()).or_default() += 1;
                            rows.push(RegimeRow { p1, p2, s, r, case });
                        }
                    }
                }
            }
            io::emit_csv(
                out,
                "regime.csv",
                &["p1", "p2", "s", "r", "case"],
                rows.iter().map(|x| {
                    vec![x.p1.to_string(), x.p2.to_string(), x.s.to_string(), x.r.to_string(), x.case.clone()]
                }),
            )?;
            io::emit_report(out, "regime", json!({ "grid": "default", "counts": counts, "rows": rows }))
        }
        Some(other) => Err(CliError::Config(format!("unknown grid {other:?}; only \"default\" exists"))),
        None => {
            let d: RegimeDecision =
                classify_regime(value(a.p1, "p1")?, value(a.p2, "p2")?, value(a.s, "s")?, value(a.r, "r")?)
                    .map_err(lib)?;
            io::emit_report(out, "regime", &d)
        }
    }
}

fn multiplier(a: &MultiplierArgs, cfg: &Settings) -> Result<(), CliError> {
    let f = io::read_function(need(&a.f, &cfg.inputs.f, "f")?)?.boundary();
    let report = multiplier_check(&f, a.p1, a.p2, a.s, a.r, &cfg.search, &cfg.quadrature).map_err(lib)?;
    if let Some(c) = &report.log_condition {
        io::emit_csv(cfg.out.as_ref(), "multiplier_profile.csv", &["level", "value"], io::profile_rows(&c.profile))?;
    }
    let ok = report.log_condition.as_ref().is_none_or(|c| c.quadrature_converged);
    io::emit_report(cfg.out.as_ref(), "multiplier", &report)?;
    demand(cfg, ok, "multiplier log condition quadrature")
}

fn spectrum(a: &SpectrumArgs, cfg: &Settings) -> Result<(), CliError> {
    let file = io::read_function(need(&a.f, &cfg.inputs.f, "f")?)?;
    let report = match a.mode {
        ModeArg::Boundary => {
            let grid = SpectrumGrid { samples: a.samples, cell: a.cell };
            spectrum_boundary(&file.boundary(), cfg.params, &grid, &cfg.search, &cfg.quadrature).map_err(lib)?
        }
        ModeArg::Analytic => spectrum_analytic(&file.analytic("analytic spectrum")?, a.cell).map_err(lib)?,
    };
    io::emit_csv(cfg.out.as_ref(), "spectrum.csv", &["re", "im"], io::complex_rows(&report.set.centers()))?;
    io::emit_report(cfg.out.as_ref(), "spectrum", &report)
}

#[derive(Serialize)]
struct VerifyEntry {
    lemma: &'static str,
    #[serde(flatten)]
    result: HarnessResult,
}

fn verify(a: &VerifyArgs, cfg: &Settings) -> Result<(), CliError> {
    let path = need(&a.inputs, &cfg.inputs.harness, "inputs")?;
    let inputs: Vec<HarnessInput> = io::read_any(path)?;
    let mut entries = Vec::with_capacity(inputs.len());
    for input in &inputs {
        let result = inequality_harness(input, &cfg.quadrature).map_err(lib)?;
        entries.push(VerifyEntry { lemma: input.lemma(), result });
    }
    let max_ratio = entries.iter().map(|e| e.result.ratio).fold(0.0, f64::max);
    let all_converged = entries.iter().all(|e| e.result.converged);
    io::emit_report(
        cfg.out.as_ref(),
        "verify",
        json!({ "max_ratio": max_ratio, "all_converged": all_converged, "results": entries }),
    )?;
    demand(cfg, all_converged, "inequality quadrature")
}

fn suite(a: &SuiteArgs, cfg: &Settings) -> Result<(), CliError> {
    let suite_cfg = SuiteConfig { search: cfg.search, quadrature: cfg.quadrature, seed: cfg.seed };
    let ids: Vec<u32> = if a.only.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { a.only.clone() };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
        return Err(CliError::Config(format!("no criterion {bad}")));
    }
    let mut results = Vec::new();
    for id in ids {
        let r = run_criterion(id, &suite_cfg);
        eprintln!("{}", r.line());
        results.push(r);
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    io::emit_report(cfg.out.as_ref(), "suite", json!({ "passed": failed.is_empty(), "results": results }))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("criteria {failed:?}")))
    }
}
