//! Discretised suprema over arcs of the circle and over points of the disk.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check, Result};
use crate::geometry::{ArcT, DiskPoint, MobiusMap};

/// Dyadic arc family and disk grid used for every supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SupSearchSpec {
    /// Finest level `J_max`: arcs of length `2π·2^{-J}`, rings at `1 - 2^{-J}`.
    pub max_level: usize,
    /// Arc centers per level are `oversample · 2^j`.
    pub center_oversample: usize,
    /// Number of best disk-grid points improved by local hyperbolic search.
    pub refine_top: usize,
}

impl Default for SupSearchSpec {
    fn default() -> Self {
        SupSearchSpec { max_level: 6, center_oversample: 1, refine_top: 3 }
    }
}

impl SupSearchSpec {
    pub fn with_level(max_level: usize) -> Self {
        SupSearchSpec { max_level, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        check(self.max_level >= 6, || format!("max level {} must be at least 6", self.max_level))?;
        check(self.max_level <= 40, || format!("max level {} exceeds 40", self.max_level))?;
        check(self.center_oversample >= 1 && self.center_oversample <= 16, || {
            format!("center oversample {} outside 1..=16", self.center_oversample)
        })
    }

    pub fn levels(&self) -> usize {
        self.max_level + 1
    }

    pub fn arc_length(level: usize) -> f64 {
        TAU / 2f64.powi(level as i32)
    }

    /// Arcs of level `j`, centered at `2π(k + i/o)/2^j`.
    pub fn arcs_at(&self, level: usize) -> Vec<ArcT> {
        if level == 0 {
            return vec![ArcT::full()];
        }
        let len = Self::arc_length(level);
        let o = self.center_oversample;
        let n = (1usize << level) * o;
        (0..n).map(|k| ArcT::new(k as f64 * len / o as f64, len).unwrap()).collect()
    }

    pub fn arc_family(&self) -> Vec<(usize, ArcT)> {
        (0..=self.max_level).flat_map(|j| self.arcs_at(j).into_iter().map(move |a| (j, a))).collect()
    }

    /// Ring `j`: the origin for `j = 0`, else `2^{j+2}` points at radius `1 - 2^{-j}`.
    pub fn ring_at(level: usize) -> Vec<DiskPoint> {
        if level == 0 {
            return vec![DiskPoint::origin()];
        }
        let r = 1.0 - 0.5f64.powi(level as i32);
        let n = 1usize << (level + 2);
        (0..n).map(|k| DiskPoint::from_polar(r, k as f64 * TAU / n as f64).unwrap()).collect()
    }

    pub fn disk_grid(&self) -> Vec<(usize, DiskPoint)> {
        (0..=self.max_level).flat_map(|j| Self::ring_at(j).into_iter().map(move |a| (j, a))).collect()
    }

    /// Ring level closest to a point, clamped to the family.
    pub fn level_of_point(&self, z: DiskPoint) -> usize {
        let d = 1.0 - z.norm();
        if d >= 0.75 {
            return 0;
        }
        ((-d.log2()).round().max(1.0) as usize).min(self.max_level)
    }
}

/// The maximizer of a discretised supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Arc { center: f64, length: f64 },
    Point { point: [f64; 2] },
}

impl Witness {
    pub fn arc(a: &ArcT) -> Self {
        Witness::Arc { center: a.center(), length: a.length() }
    }

    pub fn point(z: DiskPoint) -> Self {
        Witness::Point { point: [z.value().re, z.value().im] }
    }

    pub fn as_arc(&self) -> Option<ArcT> {
        match *self {
            Witness::Arc { center, length } => ArcT::new(center, length).ok(),
            Witness::Point { .. } => None,
        }
    }

    pub fn as_point(&self) -> Option<DiskPoint> {
        match *self {
            Witness::Point { point } => DiskPoint::try_from(point).ok(),
            Witness::Arc { .. } => None,
        }
    }
}

/// A supremum with its per-level maxima.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSup {
    pub value: f64,
    pub witness: Witness,
    pub profile: Vec<f64>,
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Maximum of `f` over the dyadic arc family.
pub fn sup_over_arcs(spec: &SupSearchSpec, f: impl Fn(&ArcT) -> f64 + Sync) -> LevelSup {
    let family = spec.arc_family();
    let values: Vec<f64> = family.par_iter().map(|(_, a)| f(a)).collect();
    let mut profile = vec![0.0f64; spec.levels()];
    for ((j, _), v) in family.iter().zip(&values) {
        profile[*j] = profile[*j].max(*v);
    }
    let best = argmax(&values);
    LevelSup { value: values[best].max(0.0), witness: Witness::arc(&family[best].1), profile }
}

/// Maximum of `f` over the disk grid, followed by local compass search in
/// pseudo-hyperbolic steps around the best points.
pub fn sup_over_points(spec: &SupSearchSpec, f: impl Fn(DiskPoint) -> f64 + Sync) -> LevelSup {
    let grid = spec.disk_grid();
    let values: Vec<f64> = grid.par_iter().map(|(_, a)| f(*a)).collect();
    let mut profile = vec![0.0f64; spec.levels()];
    for ((j, _), v) in grid.iter().zip(&values) {
        profile[*j] = profile[*j].max(*v);
    }
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let starts: Vec<usize> = order.into_iter().take(spec.refine_top).collect();
    let refined: Vec<(DiskPoint, f64)> =
        starts.par_iter().map(|&i| compass_search(grid[i].1, values[i], &f, 0.25, 0.01)).collect();

    let best = argmax(&values);
    let mut out = LevelSup { value: values[best].max(0.0), witness: Witness::point(grid[best].1), profile };
    for (z, v) in refined {
        let j = spec.level_of_point(z);
        out.profile[j] = out.profile[j].max(v);
        if v > out.value {
            out.value = v;
            out.witness = Witness::point(z);
        }
    }
    out
}

/// Local maximization in eight pseudo-hyperbolic directions with step halving.
pub(crate) fn compass_search(
    start: DiskPoint,
    start_value: f64,
    f: &(impl Fn(DiskPoint) -> f64 + Sync),
    step: f64,
    min_step: f64,
) -> (DiskPoint, f64) {
    let (mut b, mut vb) = (start, start_value);
    let mut delta = step;
    let mut iterations = 0;
    while delta >= min_step && iterations < 200 {
        iterations += 1;
        let m = MobiusMap::new(b);
        let mut moved = false;
        for k in 0..8 {
            let w = Complex64::from_polar(delta, k as f64 * TAU / 8.0);
            let Ok(c) = DiskPoint::new(m.eval(w)) else { continue };
            let vc = f(c);
            if vc > vb {
                b = c;
                vb = vc;
                moved = true;
            }
        }
        if !moved {
            delta /= 2.0;
        }
    }
    (b, vb)
}

/// `(converged, divergent)` read off a level profile.
///
/// Converged: the running maximum changed by less than 5% at the last level.
/// Divergent: the last three per-level maxima grow strictly (by more than 1%).
pub fn profile_flags(profile: &[f64]) -> (bool, bool) {
    let n = profile.len();
    if n < 2 {
        return (true, false);
    }
    let all = profile.iter().copied().fold(0.0, f64::max);
    let before = profile[..n - 1].iter().copied().fold(0.0, f64::max);
    let converged = all == 0.0 || all - before < 0.05 * all;
    let divergent = n >= 3 && (n - 3..n - 1).all(|i| profile[i + 1] > profile[i] * 1.01 && profile[i + 1] > 0.0);
    (converged, divergent)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn family_sizes() {
        let s = SupSearchSpec::default();
        assert_eq!(s.arc_family().len(), 127);
        assert_eq!(s.disk_grid().len(), 1 + (3..=8).map(|k| 1usize << k).sum::<usize>());
        let s2 = SupSearchSpec { center_oversample: 2, ..s };
        assert_eq!(s2.arcs_at(3).len(), 16);
        assert!(SupSearchSpec::with_level(5).validate().is_err());
    }

    #[test]
    fn dyadic_levels_partition() {
        let s = SupSearchSpec::default();
        for j in 1..=6 {
            let arcs = s.arcs_at(j);
            for k in 0..500 {
                let t = k as f64 * 0.0127;
                assert_eq!(arcs.iter().filter(|a| a.contains_angle(t)).count(), 1);
            }
        }
    }

    #[test]
    fn grid_covers_disk_pseudo_hyperbolically() {
        // every point with 1-|z| >= 2^{-J} is within pseudo-hyperbolic distance 1/2 of the grid
        let s = SupSearchSpec::default();
        let grid = s.disk_grid();
        for i in 0..40 {
            for k in 0..97 {
                let r = (1.0 - 0.5f64.powi(6)) * i as f64 / 39.0;
                let z = DiskPoint::from_polar(r, k as f64 * TAU / 97.0).unwrap();
                let d = grid
                    .iter()
                    .map(|(_, a)| MobiusMap::new(*a).eval(z.value()).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(d < 0.5, "{z:?}: {d}");
            }
        }
    }

    #[test]
    fn compass_finds_interior_max() {
        let target = Complex64::new(0.3, -0.6);
        let f = |z: DiskPoint| 2.0 - (z.value() - target).norm();
        let s = SupSearchSpec::default();
        let sup = sup_over_points(&s, f);
        let w = sup.witness.as_point().unwrap();
        assert!((w.value() - target).norm() < 0.01);
        assert_eq!(sup.value, sup.profile.iter().copied().fold(f64::MIN, f64::max));
    }

    #[test]
    fn flags() {
        assert_eq!(profile_flags(&[0.0, 0.0, 0.0]), (true, false));
        assert_eq!(profile_flags(&[1.0, 2.0, 1.5, 1.2]), (true, false));
        assert_eq!(profile_flags(&[1.0, 2.0, 3.0, 4.0]), (false, true));
        assert_eq!(profile_flags(&[1.0, 1.0, 1.001, 1.002]), (true, false));
    }

    #[test]
    fn slope() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 * i as f64 - 1.0)).collect();
        assert_abs_diff_eq!(fit_slope(&pts), 2.0, epsilon = 1e-14);
    }
}
