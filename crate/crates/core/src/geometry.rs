//! Arcs, Carleson sectors, disk automorphisms and approach regions.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum distance from the unit circle for a [`DiskPoint`].
pub const DISK_GUARD: f64 = 1e-14;

/// Arcs longer than this are treated as the whole circle.
const FULL_CIRCLE_SLACK: f64 = 1e-12;

/// Reduce an angle to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Signed angular difference `a - b` reduced to `(-π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// An arc of the unit circle, half-open: `[center - L/2, center + L/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcT {
    center: f64,
    length: f64,
}

impl ArcT {
    pub fn new(center: f64, length: f64) -> Result<Self> {
        if !(center.is_finite() && length.is_finite()) {
            return Err(Error::InvalidArc("non-finite center or length".into()));
        }
        if length <= 0.0 || length > TAU + FULL_CIRCLE_SLACK {
            return Err(Error::InvalidArc(format!("length {length} outside (0, 2π]")));
        }
        Ok(ArcT { center: normalize_angle(center), length: length.min(TAU) })
    }

    /// The arc from `start` counter-clockwise to `end`.
    pub fn from_endpoints(start: f64, end: f64) -> Result<Self> {
        let mut len = (end - start).rem_euclid(TAU);
        if len == 0.0 {
            len = TAU;
        }
        ArcT::new(start + len / 2.0, len)
    }

    pub fn full() -> Self {
        ArcT { center: 0.0, length: TAU }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Start angle; not normalized, so `start()..start() + length()` covers the arc.
    pub fn start(&self) -> f64 {
        self.center - self.length / 2.0
    }

    pub fn is_full(&self) -> bool {
        self.length >= TAU - FULL_CIRCLE_SLACK
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        if self.is_full() {
            return true;
        }
        (theta - self.start()).rem_euclid(TAU) < self.length
    }

    /// Same center, length `λ|I|`, clamped to the full circle.
    pub fn scaled(&self, lambda: f64) -> ScaledArc {
        let want = lambda * self.length;
        let clamped = want > TAU;
        ScaledArc {
            arc: ArcT { center: self.center, length: want.min(TAU) },
            clamped,
        }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        ArcT { center: normalize_angle(self.center + angle), length: self.length }
    }

    /// Depth `1 - r` below which points of the arc's Carleson sector lie.
    pub fn sector_depth(&self) -> f64 {
        self.length / TAU
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledArc {
    pub arc: ArcT,
    pub clamped: bool,
}

pub fn scaled_arc(arc: &ArcT, lambda: f64) -> Result<ScaledArc> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale factor {lambda} must be positive")));
    }
    Ok(arc.scaled(lambda))
}

/// A point strictly inside the unit disk, at least [`DISK_GUARD`] from the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() && z.norm() < 1.0 - DISK_GUARD {
            Ok(DiskPoint(z))
        } else {
            Err(Error::OutsideDisk { re: z.re, im: z.im })
        }
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        DiskPoint::new(Complex64::new(re, im))
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        DiskPoint::new(Complex64::from_polar(r, theta))
    }

    pub const fn origin() -> Self {
        DiskPoint(Complex64::new(0.0, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn arg(&self) -> f64 {
        normalize_angle(self.0.arg())
    }
}

impl TryFrom<[f64; 2]> for DiskPoint {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        DiskPoint::from_re_im(v[0], v[1])
    }
}

impl From<DiskPoint> for [f64; 2] {
    fn from(p: DiskPoint) -> Self {
        [p.0.re, p.0.im]
    }
}

/// A disk point stored by its exact depth `1 - |z|` and angle.
///
/// Point measures accumulating at the boundary have depths far below the
/// resolution of a complex number near modulus one; keeping the depth
/// separately preserves them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub depth: f64,
    pub angle: f64,
}

impl PolarPoint {
    pub fn new(depth: f64, angle: f64) -> Result<Self> {
        if !(depth > 0.0 && depth <= 1.0 && angle.is_finite()) {
            return Err(Error::InvalidParameter(format!("depth {depth} outside (0, 1]")));
        }
        Ok(PolarPoint { depth, angle: normalize_angle(angle) })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::OutsideDisk { re: z.re, im: z.im });
        }
        PolarPoint::new(1.0 - r, z.arg())
    }

    pub fn modulus(&self) -> f64 {
        1.0 - self.depth
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus(), self.angle)
    }

    /// `1 - |z|²` evaluated without cancellation.
    pub fn one_minus_sq(&self) -> f64 {
        self.depth * (2.0 - self.depth)
    }

    pub fn to_disk_point(&self) -> Result<DiskPoint> {
        DiskPoint::new(self.to_complex())
    }
}

/// The disk automorphism `σ_a(z) = (a - z) / (1 - āz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    a: DiskPoint,
}

impl MobiusMap {
    pub fn new(a: DiskPoint) -> Self {
        MobiusMap { a }
    }

    pub fn center(&self) -> DiskPoint {
        self.a
    }

    /// Raw formula, valid for any `z` with `āz ≠ 1` (including boundary points).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let a = self.a.0;
        (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)
    }

    pub fn apply(&self, z: DiskPoint) -> Result<DiskPoint> {
        DiskPoint::new(self.eval(z.0))
    }

    /// `|σ_a'(z)| = (1 - |a|²) / |1 - āz|²`.
    pub fn derivative_modulus(&self, z: Complex64) -> f64 {
        let a = self.a.0;
        (1.0 - a.norm_sqr()) / (Complex64::new(1.0, 0.0) - a.conj() * z).norm_sqr()
    }

    /// Angle of `σ_a(e^{iθ})`.
    pub fn boundary_angle(&self, theta: f64) -> f64 {
        self.eval(Complex64::from_polar(1.0, theta)).arg()
    }
}

pub fn mobius_apply(m: &MobiusMap, z: DiskPoint) -> Result<DiskPoint> {
    m.apply(z)
}

/// `1 - |σ_a(z)|²`, in the cancellation-free form `(1-|a|²)(1-|z|²)/|1-āz|²`.
pub fn one_minus_mobius_sq(a: DiskPoint, z: DiskPoint) -> f64 {
    one_minus_mobius_sq_raw(a.0, z.0)
}

pub(crate) fn one_minus_mobius_sq_raw(a: Complex64, z: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - a.conj() * z).norm_sqr();
    (1.0 - a.norm_sqr()) * (1.0 - z.norm_sqr()) / den
}

/// The Carleson box `{rζ : 1 - |I|/2π < r < 1, ζ ∈ I}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSector {
    pub arc: ArcT,
}

impl CarlesonSector {
    pub fn new(arc: ArcT) -> Self {
        CarlesonSector { arc }
    }

    pub fn contains(&self, z: DiskPoint) -> bool {
        z.norm() > 1.0 - self.arc.sector_depth() && self.arc.contains_angle(z.0.arg())
    }

    pub fn contains_polar(&self, z: &PolarPoint) -> bool {
        z.depth < self.arc.sector_depth() && self.arc.contains_angle(z.angle)
    }
}

pub fn sector_contains(arc: &ArcT, z: DiskPoint) -> bool {
    CarlesonSector::new(*arc).contains(z)
}

/// Tangential approach region `{re^{iφ} : 1 - r > c |sin((φ-θ)/2)|^δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentialRegion {
    delta: f64,
    c: f64,
    theta: f64,
}

impl TangentialRegion {
    pub fn new(delta: f64, c: f64, theta: f64) -> Result<Self> {
        if !(delta > 1.0 && c > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tangential region needs delta > 1 and c > 0, got delta={delta}, c={c}"
            )));
        }
        Ok(TangentialRegion { delta, c, theta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn contains(&self, z: DiskPoint) -> bool {
        let r = z.norm();
        let phi = if r == 0.0 { self.theta } else { z.0.arg() };
        self.contains_depth(1.0 - r, phi)
    }

    pub fn contains_polar(&self, z: &PolarPoint) -> bool {
        self.contains_depth(z.depth, z.angle)
    }

    fn contains_depth(&self, depth: f64, phi: f64) -> bool {
        depth > self.c * ((phi - self.theta) / 2.0).sin().abs().powf(self.delta)
    }
}

pub fn region_contains(region: &TangentialRegion, z: DiskPoint) -> bool {
    region.contains(z)
}

/// Stolz angle `{z : |1 - ζ̄z| < α(1 - |z|)}` at `ζ = e^{iθ}`.
pub fn stolz_contains(alpha: f64, theta: f64, z: DiskPoint) -> Result<bool> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidParameter(format!("Stolz aperture {alpha} must exceed 1")));
    }
    let zeta = Complex64::from_polar(1.0, theta);
    Ok((Complex64::new(1.0, 0.0) - zeta.conj() * z.0).norm() < alpha * (1.0 - z.norm()))
}

/// Pseudo-hyperbolic disk `{w : |σ_c(w)| < ρ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoHyperbolicDisk {
    center: DiskPoint,
    radius: f64,
}

impl PseudoHyperbolicDisk {
    pub fn new(center: DiskPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidParameter(format!("radius {radius} outside (0, 1)")));
        }
        Ok(PseudoHyperbolicDisk { center, radius })
    }

    pub fn center(&self) -> DiskPoint {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, w: DiskPoint) -> bool {
        MobiusMap::new(self.center).eval(w.0).norm() < self.radius
    }

    /// Euclidean center and radius of the disk.
    pub fn euclidean(&self) -> (Complex64, f64) {
        let a = self.center.0;
        let rho2 = self.radius * self.radius;
        let den = 1.0 - rho2 * a.norm_sqr();
        (a * (1.0 - rho2) / den, self.radius * (1.0 - a.norm_sqr()) / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dp(re: f64, im: f64) -> DiskPoint {
        DiskPoint::from_re_im(re, im).unwrap()
    }

    #[test]
    fn mobius_examples() {
        let m = MobiusMap::new(dp(0.5, 0.0));
        assert_abs_diff_eq!(m.apply(DiskPoint::origin()).unwrap().value().re, 0.5);
        assert!(m.apply(dp(0.5, 0.0)).unwrap().norm() < 1e-15);
        // (0.5 - 0.5i) / (1 - 0.25i) by hand: multiply by the conjugate (1 + 0.25i)
        // numerator (0.5 + 0.125) + (0.125 - 0.5)i, denominator 1.0625
        let w = m.apply(dp(0.0, 0.5)).unwrap().value();
        assert_abs_diff_eq!(w.re, 0.625 / 1.0625, epsilon = 1e-14);
        assert_abs_diff_eq!(w.im, -0.375 / 1.0625, epsilon = 1e-14);
        assert_abs_diff_eq!(w.re, 0.58824, epsilon = 1e-5);
        assert_abs_diff_eq!(w.im, -0.35294, epsilon = 1e-5);
    }

    #[test]
    fn one_minus_mobius_examples() {
        let z = dp(0.3, -0.4);
        assert_abs_diff_eq!(one_minus_mobius_sq(DiskPoint::origin(), z), 1.0 - 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(one_minus_mobius_sq(z, z), 1.0, epsilon = 1e-15);
        let v = one_minus_mobius_sq(dp(0.9, 0.0), dp(0.0, 0.9));
        assert_abs_diff_eq!(v, 0.0361 / 1.6561, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.021799, epsilon = 1e-6);
    }

    #[test]
    fn disk_guard() {
        assert!(DiskPoint::new(c(1.0, 0.0)).is_err());
        assert!(DiskPoint::new(c(1.0 - 1e-15, 0.0)).is_err());
        assert!(DiskPoint::new(c(1.0 - 1e-13, 0.0)).is_ok());
        assert!(DiskPoint::new(c(f64::NAN, 0.0)).is_err());
        let m = MobiusMap::new(dp(0.5, 0.0));
        assert!(m.apply(dp(0.0, 0.0)).is_ok());
    }

    #[test]
    fn sector_examples() {
        assert!(sector_contains(&ArcT::full(), dp(0.5, 0.0)));
        assert!(!sector_contains(&ArcT::new(0.0, 0.1).unwrap(), DiskPoint::origin()));
        let z = DiskPoint::from_polar(0.9, PI / 8.0).unwrap();
        assert!(sector_contains(&ArcT::new(0.0, PI).unwrap(), z));
    }

    #[test]
    fn half_open_arcs_partition() {
        // four quarter arcs centered at 0, π/2, π, 3π/2 cover every angle exactly once
        let arcs: Vec<_> = (0..4).map(|k| ArcT::new(k as f64 * PI / 2.0, PI / 2.0).unwrap()).collect();
        for i in 0..1000 {
            let th = i as f64 * TAU / 1000.0 + PI / 4.0 * (i % 2) as f64;
            let n = arcs.iter().filter(|a| a.contains_angle(th)).count();
            assert_eq!(n, 1, "angle {th}");
        }
        let a = ArcT::new(0.0, PI / 2.0).unwrap();
        assert!(a.contains_angle(-PI / 4.0));
        assert!(!a.contains_angle(PI / 4.0));
    }

    #[test]
    fn region_examples() {
        let om = TangentialRegion::new(2.0, 0.5, 1.0).unwrap();
        assert!(om.contains(DiskPoint::origin()));
        for r in [0.0, 0.5, 0.999, 1.0 - 1e-12] {
            assert!(om.contains(DiskPoint::from_polar(r, 1.0).unwrap()));
        }
        let om = TangentialRegion::new(2.0, 1.0, 0.0).unwrap();
        assert!(!om.contains(DiskPoint::from_polar(0.99, 0.3).unwrap()));
        assert!(TangentialRegion::new(1.0, 1.0, 0.0).is_err());
        assert!(TangentialRegion::new(2.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn stolz_examples() {
        assert!(stolz_contains(2.0, 0.0, dp(0.9, 0.0)).unwrap());
        assert!(!stolz_contains(2.0, PI, dp(0.9, 0.0)).unwrap());
        assert!(stolz_contains(1.0, 0.0, dp(0.5, 0.0)).is_err());
    }

    #[test]
    fn scaled_arc_examples() {
        let i = ArcT::new(1.0, 0.2).unwrap();
        let s = scaled_arc(&i, 1.0).unwrap();
        assert_eq!(s.arc, i);
        assert!(!s.clamped);
        let s = scaled_arc(&i, 3.0).unwrap();
        assert_abs_diff_eq!(s.arc.length(), 0.6, epsilon = 1e-15);
        assert_eq!(s.arc.center(), 1.0);
        let s = scaled_arc(&ArcT::new(1.0, 3.0).unwrap(), 3.0).unwrap();
        assert!(s.clamped);
        assert_eq!(s.arc.length(), TAU);
        assert!(scaled_arc(&i, 0.0).is_err());
    }

    #[test]
    fn arc_validation() {
        assert!(ArcT::new(0.0, 0.0).is_err());
        assert!(ArcT::new(0.0, 7.0).is_err());
        assert!(ArcT::new(f64::NAN, 1.0).is_err());
        assert_abs_diff_eq!(ArcT::new(-1.0, 1.0).unwrap().center(), TAU - 1.0, epsilon = 1e-15);
        let a = ArcT::from_endpoints(-0.5, 0.5).unwrap();
        assert_abs_diff_eq!(a.center(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.length(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn pseudo_hyperbolic_disk() {
        let a = dp(0.6, 0.2);
        let e = PseudoHyperbolicDisk::new(a, 0.5).unwrap();
        assert!(e.contains(a));
        let (cen, rad) = e.euclidean();
        assert!(cen.norm() + rad < 1.0);
        for k in 0..64 {
            let th = k as f64 * TAU / 64.0;
            let inside = DiskPoint::new(cen + Complex64::from_polar(0.99 * rad, th)).unwrap();
            let outside = DiskPoint::new(cen + Complex64::from_polar(1.01 * rad, th)).unwrap();
            assert!(e.contains(inside));
            assert!(!e.contains(outside));
        }
        assert!(PseudoHyperbolicDisk::new(a, 1.0).is_err());
    }

    #[test]
    fn polar_point_roundtrip() {
        let p = PolarPoint::new(1e-20, 0.5).unwrap();
        assert_eq!(p.one_minus_sq(), 2e-20);
        assert!(p.to_disk_point().is_err());
        let q = PolarPoint::from_complex(c(0.0, 0.5)).unwrap();
        assert_abs_diff_eq!(q.depth, 0.5);
        assert_abs_diff_eq!(q.angle, PI / 2.0);
        let s = CarlesonSector::new(ArcT::new(0.5, 0.01).unwrap());
        assert!(s.contains_polar(&p));
    }

    fn disk_point() -> impl Strategy<Value = DiskPoint> {
        (0.0f64..0.999, 0.0f64..TAU).prop_map(|(r, t)| DiskPoint::from_polar(r, t).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn involution(a in disk_point(), z in disk_point()) {
            let m = MobiusMap::new(a);
            let back = m.apply(m.apply(z).unwrap()).unwrap();
            prop_assert!((back.value() - z.value()).norm() < 1e-12);
        }

        #[test]
        fn stable_form_matches_naive(a in disk_point(), z in disk_point()) {
            let naive = 1.0 - MobiusMap::new(a).eval(z.value()).norm_sqr();
            prop_assert!((naive - one_minus_mobius_sq(a, z)).abs() < 1e-12);
        }

        #[test]
        fn sector_monotone(c in 0.0f64..TAU, l in 0.01f64..2.0, lam in 1.0f64..3.0, z in disk_point()) {
            let i = ArcT::new(c, l).unwrap();
            let j = i.scaled(lam).arc;
            if sector_contains(&i, z) {
                prop_assert!(sector_contains(&j, z));
            }
        }

        #[test]
        fn tangential_nesting(delta in 1.01f64..4.0, c1 in 0.01f64..2.0, dc in 0.0f64..2.0, th in 0.0f64..TAU, z in disk_point()) {
            let small = TangentialRegion::new(delta, c1 + dc, th).unwrap();
            let big = TangentialRegion::new(delta, c1, th).unwrap();
            if small.contains(z) {
                prop_assert!(big.contains(z));
            }
        }

        #[test]
        fn pseudo_disk_inside(a in disk_point(), rho in 0.05f64..0.95, w in disk_point()) {
            let e = PseudoHyperbolicDisk::new(a, rho).unwrap();
            let (cen, rad) = e.euclidean();
            prop_assert!(cen.norm() + rad < 1.0 + 1e-12);
            if e.contains(w) {
                prop_assert!((w.value() - cen).norm() <= rad * (1.0 + 1e-9));
            }
        }

        #[test]
        fn comparable_depth_on_half_disk(a in disk_point(), w in disk_point()) {
            let e = PseudoHyperbolicDisk::new(a, 0.5).unwrap();
            if e.contains(w) {
                let ratio = (1.0 - w.value().norm_sqr()) / (1.0 - a.value().norm_sqr());
                prop_assert!(ratio > 0.25 && ratio < 4.0);
            }
        }
    }
}
