//! Grid-evaluated univalence and directional-convexity conditions.
//!
//! Every check reduces a pointwise quantity over a [`DiskGrid`] to its
//! minimum. Ties in the reduction go to the smallest grid index, so reports
//! do not depend on thread count.

pub mod polyline;

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::AnalyticExpr;
use crate::error::{Error, Result};
use crate::mappings::{unit, HarmonicMap};
use crate::par;

/// Tolerance applied to conditions stated as strict or non-strict inequalities.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Tolerance of the rotational-symmetry identity.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Number of uniformly spaced α values tried by [`search_koepf_alpha`].
pub const KOEPF_ALPHA_STEPS: usize = 64;
/// Samples closer than this are treated as a degenerate boundary curve.
pub const DEGENERATE_SAMPLE: f64 = 1e-14;

/// Polar lattice `(j/n_r)·r_max·e^{2πik/n_θ}`, `j = 1..n_r`, `k = 0..n_θ-1`,
/// plus the origin at index 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_max: f64,
}

impl DiskGrid {
    pub fn new(n_r: usize, n_theta: usize, r_max: f64) -> Result<Self> {
        if n_r == 0 || n_theta == 0 {
            return Err(Error::InvalidArgument("grid needs n_r, n_theta >= 1".into()));
        }
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(Error::InvalidArgument(format!("grid radius {r_max} outside (0, 1)")));
        }
        Ok(DiskGrid { n_r, n_theta, r_max })
    }

    /// 100 × 256 lattice reaching 0.95, or 0.01 inside a smaller validity radius.
    pub fn default_for(map_r_max: f64) -> Self {
        let r = 0.95_f64.min(map_r_max - 0.01);
        DiskGrid::new(100, 256, r).expect("default grid radius")
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ring `j` (1-based) and angle index `k` of a lattice index; `None` at the origin.
    pub fn ring_and_angle(&self, index: usize) -> Option<(usize, usize)> {
        if index == 0 {
            None
        } else {
            Some(((index - 1) / self.n_theta + 1, (index - 1) % self.n_theta))
        }
    }

    pub fn index_of(&self, ring: usize, angle: usize) -> usize {
        1 + (ring - 1) * self.n_theta + angle
    }

    pub fn radius(&self, ring: usize) -> f64 {
        (ring as f64 / self.n_r as f64) * self.r_max
    }

    pub fn angle(&self, k: usize) -> f64 {
        (k as f64 / self.n_theta as f64) * TAU
    }

    pub fn point(&self, index: usize) -> Complex64 {
        match self.ring_and_angle(index) {
            None => Complex64::new(0.0, 0.0),
            Some((j, k)) => Complex64::from_polar(self.radius(j), self.angle(k)),
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Index of the point rotated by `-shift` angle steps.
    pub fn rotated_index(&self, index: usize, shift: usize) -> usize {
        match self.ring_and_angle(index) {
            None => 0,
            Some((j, k)) => {
                let shift = shift % self.n_theta;
                self.index_of(j, (k + self.n_theta - shift) % self.n_theta)
            }
        }
    }

    pub fn refined(&self) -> Self {
        DiskGrid { n_r: 2 * self.n_r, n_theta: 2 * self.n_theta, r_max: self.r_max }
    }
}

/// How `min_value` is compared against the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassRule {
    /// `min_value >= -tolerance`
    NonNegative,
    /// `min_value > tolerance`
    Positive,
}

impl PassRule {
    pub fn passes(self, min_value: f64, tolerance: f64) -> bool {
        match self {
            PassRule::NonNegative => min_value >= -tolerance,
            PassRule::Positive => min_value > tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub grid: DiskGrid,
    pub min_value: f64,
    pub argmin: Complex64,
    pub argmin_index: usize,
    pub tolerance: f64,
    pub rule: PassRule,
    pub passed: bool,
    /// `min_value > 0`, the strict reading of "> 0" conditions.
    pub strictly_positive: bool,
    pub parameters: BTreeMap<String, f64>,
}

impl CriterionReport {
    fn new(
        criterion: &str,
        grid: DiskGrid,
        (min_value, argmin_index): (f64, usize),
        tolerance: f64,
        rule: PassRule,
    ) -> Self {
        CriterionReport {
            criterion: criterion.to_string(),
            grid,
            min_value,
            argmin: grid.point(argmin_index),
            argmin_index,
            tolerance,
            rule,
            passed: rule.passes(min_value, tolerance),
            strictly_positive: min_value > 0.0,
            parameters: BTreeMap::new(),
        }
    }

    fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    /// Re-evaluates the verdict against another tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.rule.passes(self.min_value, tolerance);
        self
    }
}

/// Minimum of `f` over the grid with ties broken toward the smallest index.
fn grid_min<F>(grid: &DiskGrid, f: F) -> Result<(f64, usize)>
where
    F: Fn(Complex64) -> Result<f64> + Send + Sync,
{
    let values = par::try_map_range(grid.len(), |i| f(grid.point(i)))?;
    let mut best = (f64::INFINITY, 0);
    for (i, v) in values.into_iter().enumerate() {
        if v.is_nan() {
            let z = grid.point(i);
            return Err(Error::NonFinite { re: z.re, im: z.im });
        }
        if v < best.0 {
            best = (v, i);
        }
    }
    Ok(best)
}

/// Minimum over the grid of the Jacobian `|h'|² - |g'|²` (strictly positive to pass).
pub fn check_local_univalence(f: &HarmonicMap, grid: &DiskGrid) -> Result<CriterionReport> {
    let min = grid_min(grid, |z| f.jacobian(z))?;
    Ok(CriterionReport::new("local_univalence", *grid, min, DEFAULT_TOLERANCE, PassRule::Positive))
}

/// Minimum over the grid of `Re{(1-z²)φ'(z)}`.
pub fn check_hs(phi: &AnalyticExpr, grid: &DiskGrid) -> Result<CriterionReport> {
    let dphi = phi.derivative();
    let one = Complex64::new(1.0, 0.0);
    let min = grid_min(grid, |z| Ok(((one - z * z) * dphi.eval(z)?).re))?;
    Ok(CriterionReport::new("hs", *grid, min, DEFAULT_TOLERANCE, PassRule::NonNegative))
}

/// Minimum over the grid of `Re{φ'(z)(1 + z e^{i(α+β)})(1 + z e^{-i(α-β)})}`.
pub fn check_koepf(phi: &AnalyticExpr, beta: f64, alpha: f64, grid: &DiskGrid) -> Result<CriterionReport> {
    let dphi = phi.derivative();
    koepf_with_derivative(&dphi, beta, alpha, grid)
}

fn koepf_with_derivative(
    dphi: &AnalyticExpr,
    beta: f64,
    alpha: f64,
    grid: &DiskGrid,
) -> Result<CriterionReport> {
    let one = Complex64::new(1.0, 0.0);
    let u = unit(alpha + beta);
    let v = unit(-(alpha - beta));
    let min = grid_min(grid, |z| Ok((dphi.eval(z)? * (one + z * u) * (one + z * v)).re))?;
    Ok(CriterionReport::new("koepf", *grid, min, DEFAULT_TOLERANCE, PassRule::NonNegative)
        .with_param("beta", beta)
        .with_param("alpha", alpha))
}

/// Tries `α = 2πm/64` and keeps the one with the largest minimum.
pub fn search_koepf_alpha(phi: &AnalyticExpr, beta: f64, grid: &DiskGrid) -> Result<CriterionReport> {
    let dphi = phi.derivative();
    let mut best: Option<CriterionReport> = None;
    for m in 0..KOEPF_ALPHA_STEPS {
        let alpha = TAU * m as f64 / KOEPF_ALPHA_STEPS as f64;
        let report = koepf_with_derivative(&dphi, beta, alpha, grid)?;
        if best.as_ref().is_none_or(|b| report.min_value > b.min_value) {
            best = Some(report);
        }
    }
    let mut report = best.expect("at least one alpha");
    report.criterion = "koepf_alpha_search".to_string();
    Ok(report)
}

/// Minimum over `z = re^{iγ}` of
/// `[cos α + cos(β+γ)]·[φ_R' cos(β+γ) - φ_I' sin(β+γ)]`, with `φ' = φ_R' + iφ_I'`.
pub fn check_taylor(phi: &AnalyticExpr, beta: f64, alpha: f64, grid: &DiskGrid) -> Result<CriterionReport> {
    let dphi = phi.derivative();
    let min = grid_min(grid, |z| Ok(taylor_value(dphi.eval(z)?, z.arg(), beta, alpha)))?;
    Ok(CriterionReport::new("taylor", *grid, min, DEFAULT_TOLERANCE, PassRule::NonNegative)
        .with_param("beta", beta)
        .with_param("alpha", alpha))
}

/// Pointwise value of the Taylor-form condition for derivative `dphi` at angle `gamma`.
pub fn taylor_value(dphi: Complex64, gamma: f64, beta: f64, alpha: f64) -> f64 {
    let theta = beta + gamma;
    (alpha.cos() + theta.cos()) * (dphi.re * theta.cos() - dphi.im * theta.sin())
}

fn is_imaginary_direction(beta: f64) -> bool {
    let reduced = (beta - PI / 2.0).rem_euclid(PI);
    reduced < 1e-12 || PI - reduced < 1e-12
}

/// Univalence and convexity in the `e^{iβ}` direction via the shear
/// `h - e^{2iβ}g`: local univalence plus the Hengartner–Schober condition for
/// the imaginary direction, or the α-searched Koepf condition otherwise.
pub fn check_css_univalence(f: &HarmonicMap, beta: f64, grid: &DiskGrid) -> Result<CriterionReport> {
    let local = check_local_univalence(f, grid)?;
    let phi = f.shear(beta);
    let shear = if is_imaginary_direction(beta) {
        check_hs(&phi, grid)?
    } else {
        search_koepf_alpha(&phi, beta, grid)?
    };
    let weaker = if local.min_value <= shear.min_value { &local } else { &shear };
    let mut report = CriterionReport {
        criterion: "css_univalence".to_string(),
        grid: *grid,
        min_value: weaker.min_value,
        argmin: weaker.argmin,
        argmin_index: weaker.argmin_index,
        tolerance: DEFAULT_TOLERANCE,
        rule: weaker.rule,
        passed: local.passed && shear.passed,
        strictly_positive: local.strictly_positive && shear.strictly_positive,
        parameters: BTreeMap::new(),
    };
    report.parameters.insert("beta".into(), beta);
    report.parameters.insert("local_univalence_min".into(), local.min_value);
    report.parameters.insert("shear_min".into(), shear.min_value);
    if let Some(alpha) = shear.parameters.get("alpha") {
        report.parameters.insert("alpha".into(), *alpha);
    }
    Ok(report)
}

/// Largest `|ω_a - ω_b|` over the grid and where it occurs.
pub fn dilatation_gap(a: &HarmonicMap, b: &HarmonicMap, grid: &DiskGrid) -> Result<(f64, Complex64)> {
    let (neg, idx) = grid_min(grid, |z| Ok(-(a.dilatation(z)? - b.dilatation(z)?).norm()))?;
    Ok((-neg, grid.point(idx)))
}

pub fn check_dilatation_equal(a: &HarmonicMap, b: &HarmonicMap, grid: &DiskGrid, tol: f64) -> Result<bool> {
    Ok(dilatation_gap(a, b, grid)?.0 <= tol)
}

/// Largest `|e^{2πij/k} f(z e^{-2πij/k}) - f(z)|` over the grid and
/// `j = 1..k-1`, reported as `min_value = -max_error`.
pub fn check_rotational_symmetry(f: &HarmonicMap, k: usize, grid: &DiskGrid) -> Result<CriterionReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("symmetry order must be >= 1".into()));
    }
    let on_lattice = grid.n_theta.is_multiple_of(k);
    let errors = par::try_map_range(grid.len(), |i| {
        let z = grid.point(i);
        let fz = f.eval(z)?;
        let mut worst = 0.0_f64;
        for j in 1..k {
            let turn = unit(TAU * j as f64 / k as f64);
            let rotated = if on_lattice {
                grid.point(grid.rotated_index(i, j * grid.n_theta / k))
            } else {
                z * turn.conj()
            };
            worst = worst.max((turn * f.eval(rotated)? - fz).norm());
        }
        Ok::<_, Error>(worst)
    })?;
    let mut best = (f64::INFINITY, 0);
    for (i, e) in errors.into_iter().enumerate() {
        if (-e) < best.0 {
            best = (-e, i);
        }
    }
    Ok(CriterionReport::new("rotational_symmetry", *grid, best, SYMMETRY_TOLERANCE, PassRule::NonNegative)
        .with_param("k", k as f64))
}

/// Samples `f(re^{2πik/n})` and tests the closed polyline for self-intersection.
///
/// `min_value` is the smallest separation of non-adjacent segments when the
/// curve is simple, and minus the number of offending segment pairs otherwise.
pub fn check_injectivity_boundary(f: &HarmonicMap, r: f64, n: usize) -> Result<CriterionReport> {
    if n < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 boundary samples, got {n}")));
    }
    if !(r > 0.0 && r < f.r_max()) {
        return Err(Error::domain(Complex64::new(r, 0.0), f.r_max()));
    }
    let ring = DiskGrid::new(1, n, r)?;
    let samples = par::try_map_range(n, |k| f.eval(ring.point(k + 1)))?;
    for k in 0..n {
        let next = (k + 1) % n;
        if (samples[next] - samples[k]).norm() < DEGENERATE_SAMPLE {
            return Err(Error::DegenerateCurve { index: k, next });
        }
    }
    let scan = polyline::scan_closed(&samples);
    let (value, segment) = match scan.crossings.first() {
        Some(&(i, _)) => (-(scan.crossings.len() as f64), i),
        None => (scan.min_separation, scan.closest_pair.0),
    };
    Ok(CriterionReport::new("injectivity_boundary", ring, (value, segment + 1), 0.0, PassRule::NonNegative)
        .with_param("r", r)
        .with_param("samples", n as f64)
        .with_param("crossings", scan.crossings.len() as f64))
}

/// Where `Re φ` peaks and bottoms out on circles approaching the rim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationScan {
    pub radii: Vec<f64>,
    pub sup_points: Vec<Complex64>,
    pub inf_points: Vec<Complex64>,
    /// On the outermost circle the supremum sits within `angle_tol` of `+1`.
    pub sup_near_plus_one: bool,
    /// On the outermost circle the infimum sits within `angle_tol` of `-1`.
    pub inf_near_minus_one: bool,
}

/// Diagnostic for the boundary normalization that accompanies the
/// Hengartner–Schober condition. Never used as a pass/fail gate.
pub fn normalization_scan(
    phi: &AnalyticExpr,
    r_outer: f64,
    levels: usize,
    n: usize,
    angle_tol: f64,
) -> Result<NormalizationScan> {
    if levels == 0 || n == 0 {
        return Err(Error::InvalidArgument("normalization scan needs levels, n >= 1".into()));
    }
    let mut out = NormalizationScan {
        radii: Vec::with_capacity(levels),
        sup_points: Vec::with_capacity(levels),
        inf_points: Vec::with_capacity(levels),
        sup_near_plus_one: false,
        inf_near_minus_one: false,
    };
    for m in 0..levels {
        let r = r_outer * (1.0 - 0.5_f64.powi(m as i32 + 1)) / (1.0 - 0.5_f64.powi(levels as i32));
        let ring = DiskGrid::new(1, n, r)?;
        let values = par::try_map_range(n, |k| Ok::<_, Error>(phi.eval(ring.point(k + 1))?.re))?;
        let (mut hi, mut lo) = (0, 0);
        for (k, v) in values.iter().enumerate() {
            if *v > values[hi] {
                hi = k;
            }
            if *v < values[lo] {
                lo = k;
            }
        }
        out.radii.push(r);
        out.sup_points.push(ring.point(hi + 1));
        out.inf_points.push(ring.point(lo + 1));
    }
    let sup = *out.sup_points.last().expect("levels >= 1");
    let inf = *out.inf_points.last().expect("levels >= 1");
    out.sup_near_plus_one = sup.arg().abs() <= angle_tol;
    out.inf_near_minus_one = PI - inf.arg().abs() <= angle_tol;
    Ok(out)
}
