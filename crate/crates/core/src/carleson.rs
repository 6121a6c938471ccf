//! Carleson-measure tests for point measures and gradient densities.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check, Error, Result};
use crate::functions::BoundaryFunction;
use crate::geometry::{ArcT, DiskPoint, PolarPoint};
use crate::quadrature::{DiskIntegral, DiskRegion, QuadratureSpec};
use crate::search::{fit_slope, profile_flags, sup_over_points, LevelSup, SupSearchSpec, Witness};
use crate::seminorms::log_weight;

/// Bounded verdict threshold on the trend slope.
pub const SLOPE_THRESHOLD: f64 = -0.05;

/// Number of final levels used by the trend regression.
pub const TREND_LEVELS: usize = 4;

/// A point mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub point: PolarPoint,
    pub mass: f64,
}

/// `Σ_k m_k δ_{z_k}` with nonnegative masses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiscretePointMeasure {
    atoms: Vec<Atom>,
    /// Boundary angle the atoms accumulate at, when known.
    pub accumulation_angle: Option<f64>,
}

impl DiscretePointMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for a in &atoms {
            check(a.mass >= 0.0 && a.mass.is_finite(), || format!("mass {} must be nonnegative", a.mass))?;
        }
        Ok(DiscretePointMeasure { atoms, accumulation_angle: None })
    }

    pub fn from_points(points: &[(DiskPoint, f64)]) -> Result<Self> {
        let atoms = points
            .iter()
            .map(|(z, m)| Ok(Atom { point: PolarPoint::from_complex(z.value())?, mass: *m }))
            .collect::<Result<Vec<_>>>()?;
        DiscretePointMeasure::new(atoms)
    }

    pub fn with_accumulation(mut self, angle: f64) -> Self {
        self.accumulation_angle = Some(angle);
        self
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn push(&mut self, atom: Atom) -> Result<()> {
        check(atom.mass >= 0.0 && atom.mass.is_finite(), || format!("mass {} must be nonnegative", atom.mass))?;
        self.atoms.push(atom);
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `μ(S(I))`.
    pub fn sector_mass(&self, arc: &ArcT) -> f64 {
        let depth = arc.sector_depth();
        self.atoms
            .iter()
            .filter(|a| a.point.depth < depth && arc.contains_angle(a.point.angle))
            .map(|a| a.mass)
            .sum()
    }

    /// Angle used to center trend arcs: the accumulation angle if known,
    /// else the angle of the deepest atom with positive mass.
    pub fn trend_angle(&self) -> f64 {
        if let Some(t) = self.accumulation_angle {
            return t;
        }
        self.atoms
            .iter()
            .filter(|a| a.mass > 0.0)
            .min_by(|a, b| a.point.depth.total_cmp(&b.point.depth))
            .map_or(0.0, |a| a.point.angle)
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    atoms: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    accumulation_angle: Option<f64>,
    /// Exact depths `1 - |z_k|`, emitted when some atom is too close to the
    /// circle for `[re, im]` to carry its depth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depths: Option<Vec<f64>>,
}

/// Depth below which `[re, im]` no longer round-trips the depth to 1e-6 relative.
const DEPTH_EXPORT: f64 = 1e-8;

impl Serialize for DiscretePointMeasure {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let z = a.point.to_complex();
                [z.re, z.im, a.mass]
            })
            .collect();
        let deep = self.atoms.iter().any(|a| a.point.depth < DEPTH_EXPORT);
        let depths = deep.then(|| self.atoms.iter().map(|a| a.point.depth).collect());
        MeasureJson { atoms, accumulation_angle: self.accumulation_angle, depths }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DiscretePointMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MeasureJson::deserialize(de)?;
        if let Some(d) = &raw.depths {
            if d.len() != raw.atoms.len() {
                return Err(D::Error::custom("depths and atoms differ in length"));
            }
        }
        let atoms = raw
            .atoms
            .iter()
            .enumerate()
            .map(|(i, [re, im, m])| {
                let z = Complex64::new(*re, *im);
                let point = match &raw.depths {
                    Some(d) => PolarPoint::new(d[i], z.arg()),
                    None => PolarPoint::from_complex(z),
                }?;
                Ok(Atom { point, mass: *m })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let mut mu = DiscretePointMeasure::new(atoms).map_err(D::Error::custom)?;
        mu.accumulation_angle = raw.accumulation_angle;
        Ok(mu)
    }
}

/// A Carleson supremum with its trend diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub value: f64,
    pub witness: Witness,
    pub profile: Vec<f64>,
    /// Regression slope of log per-level maxima against log arc length over
    /// the final levels.
    pub slope: f64,
    pub bounded: bool,
    pub converged: bool,
    pub quadrature_converged: bool,
}

/// Slope of `log profile[j]` against `log |I_j|` over the last [`TREND_LEVELS`] levels.
pub fn profile_slope(profile: &[f64]) -> f64 {
    let n = profile.len();
    let from = n.saturating_sub(TREND_LEVELS);
    let pts: Vec<(f64, f64)> = (from..n)
        .filter(|&j| profile[j] > 0.0)
        .map(|j| (SupSearchSpec::arc_length(j).ln(), profile[j].ln()))
        .collect();
    if pts.len() < 2 {
        0.0
    } else {
        fit_slope(&pts)
    }
}

impl CarlesonReport {
    fn from_sup(sup: LevelSup, quadrature_converged: bool) -> Self {
        let slope = profile_slope(&sup.profile);
        let (converged, _) = profile_flags(&sup.profile);
        CarlesonReport {
            value: sup.value,
            witness: sup.witness,
            profile: sup.profile,
            slope,
            bounded: slope >= SLOPE_THRESHOLD,
            converged,
            quadrature_converged,
        }
    }
}

/// Sector masses `μ(S(I))` for every arc of `arcs_at(level)`, in order.
///
/// Atoms are binned by angle, one pass per center shift.
pub fn level_sector_masses(mu: &DiscretePointMeasure, spec: &SupSearchSpec, level: usize) -> Vec<f64> {
    if level == 0 {
        let arc = ArcT::full();
        return vec![mu.sector_mass(&arc)];
    }
    let len = SupSearchSpec::arc_length(level);
    let depth = len / std::f64::consts::TAU;
    let n = 1usize << level;
    let o = spec.center_oversample;
    let mut out = vec![0.0; n * o];
    for a in mu.atoms.iter().filter(|a| a.point.depth < depth) {
        for i in 0..o {
            // arc m·o + i is [(m + i/o)L - L/2, (m + i/o)L + L/2)
            let shifted = a.point.angle - i as f64 * len / o as f64 + len / 2.0;
            let mut m = (shifted / len).floor() as i64;
            let arc = ArcT::new((m as f64 + i as f64 / o as f64) * len, len).unwrap();
            // the floor can land one cell off at a rounding boundary
            if !arc.contains_angle(a.point.angle) {
                m += if arc.contains_angle(a.point.angle - len) { -1 } else { 1 };
            }
            let k = m.rem_euclid(n as i64) as usize;
            out[k * o + i] += a.mass;
        }
    }
    out
}

fn sector_sup(mu: &DiscretePointMeasure, s: f64, alpha: f64, spec: &SupSearchSpec) -> LevelSup {
    let mut profile = Vec::with_capacity(spec.levels());
    let mut best = (0.0f64, Witness::arc(&ArcT::full()));
    let mut first = true;
    for j in 0..=spec.max_level {
        let arcs = spec.arcs_at(j);
        let masses = level_sector_masses(mu, spec, j);
        let len = SupSearchSpec::arc_length(j);
        let w = log_weight(len, alpha) * len.powf(-s);
        let mut level_max = 0.0f64;
        for (arc, m) in arcs.iter().zip(&masses) {
            let v = w * m;
            level_max = level_max.max(v);
            if first || v > best.0 {
                best = (v, Witness::arc(arc));
                first = false;
            }
        }
        profile.push(level_max);
    }
    LevelSup { value: best.0.max(0.0), witness: best.1, profile }
}

/// `sup_I μ(S(I)) / |I|^s` over the dyadic arc family.
pub fn sector_carleson_sup(mu: &DiscretePointMeasure, s: f64, spec: &SupSearchSpec) -> Result<CarlesonReport> {
    check(s > 0.0, || format!("s = {s} must be positive"))?;
    spec.validate()?;
    Ok(CarlesonReport::from_sup(sector_sup(mu, s, 0.0, spec), true))
}

/// `((1 - |a|²) / |1 - āz|²)^s` for a grid point and a polar atom, without
/// cancellation near the circle.
fn mobius_kernel(a_depth: f64, a_angle: f64, z: &PolarPoint, s: f64) -> f64 {
    let (da, dz) = (a_depth, z.depth);
    let (ra, rz) = (1.0 - da, 1.0 - dz);
    let near = da + dz - da * dz;
    let half = 0.5 * (a_angle - z.angle);
    let den = near * near + 4.0 * ra * rz * half.sin().powi(2);
    (da * (2.0 - da) / den).powf(s)
}

fn mobius_value(mu: &DiscretePointMeasure, a: DiskPoint, s: f64, alpha: f64) -> f64 {
    let da = 1.0 - a.norm();
    let phi = a.arg();
    let sum: f64 = mu.atoms.iter().map(|z| z.mass * mobius_kernel(da, phi, &z.point, s)).sum();
    if alpha == 0.0 {
        sum
    } else {
        let lw = (2.0 / (da * (2.0 - da))).ln().max(0.0);
        lw.powf(alpha) * sum
    }
}

/// `sup_a Σ_k m_k ((1 - |a|²) / |1 - āz_k|²)^s` over the disk grid.
pub fn mobius_carleson_sup(mu: &DiscretePointMeasure, s: f64, spec: &SupSearchSpec) -> Result<CarlesonReport> {
    check(s > 0.0, || format!("s = {s} must be positive"))?;
    spec.validate()?;
    Ok(CarlesonReport::from_sup(sup_over_points(spec, |a| mobius_value(mu, a, s, 0.0)), true))
}

/// Which form of the logarithmic Carleson condition to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarlesonForm {
    #[default]
    Sector,
    Mobius,
}

/// `sup_I (log 2/|I|)^α μ(S(I)) / |I|^s`, or the Möbius form
/// `sup_a (log 2/(1-|a|²))^α Σ_k m_k ((1-|a|²)/|1-āz_k|²)^s`.
///
/// With `α = 0` this is [`sector_carleson_sup`] (or [`mobius_carleson_sup`]) exactly.
pub fn log_carleson_sup(
    mu: &DiscretePointMeasure,
    s: f64,
    alpha: f64,
    form: CarlesonForm,
    spec: &SupSearchSpec,
) -> Result<CarlesonReport> {
    check(alpha >= 0.0, || format!("log exponent {alpha} must be nonnegative"))?;
    check(s > 0.0, || format!("s = {s} must be positive"))?;
    spec.validate()?;
    let sup = match form {
        CarlesonForm::Sector => sector_sup(mu, s, alpha, spec),
        CarlesonForm::Mobius => sup_over_points(spec, |a| mobius_value(mu, a, s, alpha)),
    };
    Ok(CarlesonReport::from_sup(sup, true))
}

/// Sector test for `dμ = |∇f̂|^p (1 - |z|²)^{p-2+s} dA` with optional log weight.
pub fn gradient_carleson(
    f: &BoundaryFunction,
    p: f64,
    s: f64,
    alpha: f64,
    spec: &SupSearchSpec,
    q: &QuadratureSpec,
) -> Result<CarlesonReport> {
    check(p > 1.0, || format!("p = {p} must exceed 1"))?;
    check(s > 0.0 && s < 1.0, || format!("s = {s} outside (0, 1)"))?;
    check(alpha >= 0.0, || format!("log exponent {alpha} must be nonnegative"))?;
    spec.validate()?;
    q.validate()?;
    let field = f.extension_field();
    let density = |z: Complex64| field.gradient_norm(z).powf(p);
    let integral = DiskIntegral { density: &density, alpha: p - 2.0 + s, hints: field.hints() };
    let family = spec.arc_family();
    let values: Vec<f64> = family
        .par_iter()
        .map(|(_, arc)| {
            let w = log_weight(arc.length(), alpha);
            if w == 0.0 {
                return 0.0;
            }
            w * arc.length().powf(-s) * integral.value(&DiskRegion::Sector(*arc), q)
        })
        .collect();
    let mut profile = vec![0.0f64; spec.levels()];
    let mut best = 0;
    for (i, ((j, _), v)) in family.iter().zip(&values).enumerate() {
        profile[*j] = profile[*j].max(*v);
        if *v > values[best] {
            best = i;
        }
    }
    let arc = family[best].1;
    let ok = values[best] == 0.0 || integral.estimate(&DiskRegion::Sector(arc), q).converged;
    let sup = LevelSup { value: values[best].max(0.0), witness: Witness::arc(&arc), profile };
    Ok(CarlesonReport::from_sup(sup, ok))
}

/// `Σ_k (1 - |z_k|)^γ δ_{z_k}`.
pub fn blaschke_zero_measure(zeros: &[PolarPoint], exponent: f64) -> Result<DiscretePointMeasure> {
    check(exponent > 0.0 && exponent < 1.0, || format!("exponent {exponent} outside (0, 1)"))?;
    let atoms = zeros.iter().map(|z| Atom { point: *z, mass: z.depth.powf(exponent) }).collect();
    DiscretePointMeasure::new(atoms)
}

/// Least-squares slope of `log[μ(S(I))/|I|^s]` against `log |I|` for arcs
/// centered at `theta` with lengths `2π·2^{-j}`, `j ∈ levels`.
pub fn carleson_trend(mu: &DiscretePointMeasure, s: f64, theta: f64, levels: &[usize]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .filter_map(|&j| {
            let len = SupSearchSpec::arc_length(j);
            let arc = ArcT::new(theta, len).ok()?;
            let m = mu.sector_mass(&arc);
            (m > 0.0).then(|| (len.ln(), m.ln() - s * len.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::TooFewLevels(pts.len()));
    }
    Ok(fit_slope(&pts))
}

/// Bounded verdict for a trend slope.
pub fn trend_bounded(slope: f64) -> bool {
    slope >= SLOPE_THRESHOLD
}

/// Carleson membership test for a Blaschke product with the given
/// zeros: the zero measure with exponent `s` must be `s`-Carleson.
pub fn inner_membership(zeros: &[PolarPoint], s: f64, spec: &SupSearchSpec) -> Result<CarlesonReport> {
    let mu = blaschke_zero_measure(zeros, s)?;
    sector_carleson_sup(&mu, s, spec)
}
