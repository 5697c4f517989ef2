//! Harmonic mappings `f = h + conj(g)`, the built-in catalog, shears and
//! convex combinations.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticExpr, Order, DEFAULT_NODES, DEFAULT_R_MAX, POLE_GUARD};
use crate::criteria::{dilatation_gap, DiskGrid};
use crate::error::{Error, Result};

/// Catalog entries in listing order.
pub const CATALOG_NAMES: [&str; 6] = [
    "enneper",
    "scherk-singly",
    "scherk-doubly",
    "catenoid",
    "enneper4",
    "noid4",
];

/// Validity radius of the two 4-fold entries.
pub const FOURFOLD_R_MAX: f64 = 0.95;

/// Tolerance of the dilatation-equality precondition of [`combine`].
pub const COMBINE_DILATATION_TOL: f64 = 1e-10;

/// A harmonic mapping together with an analytic square root `q` of its
/// dilatation, valid on `{|z| < r_max}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapRepr", into = "MapRepr")]
pub struct HarmonicMap {
    name: String,
    h: AnalyticExpr,
    g: AnalyticExpr,
    q: AnalyticExpr,
    r_max: f64,
    dh: AnalyticExpr,
    dg: AnalyticExpr,
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    name: String,
    h: AnalyticExpr,
    g: AnalyticExpr,
    q: AnalyticExpr,
    r_max: f64,
}

impl TryFrom<MapRepr> for HarmonicMap {
    type Error = Error;

    fn try_from(repr: MapRepr) -> Result<Self> {
        HarmonicMap::new(repr.name, repr.h, repr.g, repr.q, repr.r_max)
    }
}

impl From<HarmonicMap> for MapRepr {
    fn from(map: HarmonicMap) -> Self {
        MapRepr { name: map.name, h: map.h, g: map.g, q: map.q, r_max: map.r_max }
    }
}

impl HarmonicMap {
    pub fn new(
        name: impl Into<String>,
        h: AnalyticExpr,
        g: AnalyticExpr,
        q: AnalyticExpr,
        r_max: f64,
    ) -> Result<Self> {
        if !(r_max > 0.0 && r_max <= 1.0) {
            return Err(Error::InvalidArgument(format!("r_max {r_max} outside (0, 1]")));
        }
        let h = h.with_r_max(r_max);
        let g = g.with_r_max(r_max);
        let q = q.with_r_max(r_max);
        let dh = h.derivative();
        let dg = g.derivative();
        Ok(HarmonicMap { name: name.into(), h, g, q, r_max, dh, dg })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn h(&self) -> &AnalyticExpr {
        &self.h
    }

    pub fn g(&self) -> &AnalyticExpr {
        &self.g
    }

    pub fn q(&self) -> &AnalyticExpr {
        &self.q
    }

    /// `h'` as a symbolic expression.
    pub fn dh(&self) -> &AnalyticExpr {
        &self.dh
    }

    pub fn dg(&self) -> &AnalyticExpr {
        &self.dg
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// `h(z) + conj(g(z))`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.h.eval(z)? + self.g.eval(z)?.conj())
    }

    /// `(h'(z), g'(z))`.
    pub fn derivatives(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        Ok((self.dh.eval(z)?, self.dg.eval(z)?))
    }

    /// `g'(z) / h'(z)`.
    pub fn dilatation(&self, z: Complex64) -> Result<Complex64> {
        let (dh, dg) = self.derivatives(z)?;
        let modulus = dh.norm();
        if modulus < POLE_GUARD {
            return Err(Error::Pole { re: z.re, im: z.im, modulus });
        }
        Ok(dg / dh)
    }

    /// Jacobian `|h'|² - |g'|²` of `h + conj(g)`.
    pub fn jacobian(&self, z: Complex64) -> Result<f64> {
        let (dh, dg) = self.derivatives(z)?;
        Ok(dh.norm_sqr() - dg.norm_sqr())
    }

    /// `h'(z)q(z)`, the single-valued square root of `h'g'`.
    pub fn height_integrand(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.dh.eval(z)? * self.q.eval(z)?)
    }

    /// `h'` and its derivative, for second partials of the lift.
    pub fn derivative_jets(&self, z: Complex64) -> Result<(crate::Jet, crate::Jet, crate::Jet)> {
        Ok((
            self.dh.eval_d(z, Order::First)?,
            self.dg.eval_d(z, Order::First)?,
            self.q.eval_d(z, Order::First)?,
        ))
    }

    /// Shear `h - e^{2iβ} g`.
    pub fn shear(&self, beta: f64) -> AnalyticExpr {
        let rot = unit(2.0 * beta);
        AnalyticExpr::linear_combination(vec![
            (Complex64::new(1.0, 0.0), self.h.clone()),
            (-rot, self.g.clone()),
        ])
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `e^{iθ}` with components within a few ulps of 0 or ±1 snapped, so
/// quarter turns stay exact.
pub fn unit(theta: f64) -> Complex64 {
    let snap = |v: f64| {
        if v.abs() < 4.0 * f64::EPSILON {
            0.0
        } else if (v.abs() - 1.0).abs() < 4.0 * f64::EPSILON {
            v.signum()
        } else {
            v
        }
    };
    Complex64::new(snap(theta.cos()), snap(theta.sin()))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn l() -> AnalyticExpr {
    AnalyticExpr::atanh_log()
}

/// `L(iz) = log((1+iz)/(1-iz))`, which equals `log((i-z)/(i+z))` on the disk.
fn l_i() -> AnalyticExpr {
    AnalyticExpr::atanh_log_rotated(c(0.0, 1.0)).expect("unit rotation")
}

fn one_minus(n: u32) -> AnalyticExpr {
    AnalyticExpr::real(1.0) - AnalyticExpr::pow(n)
}

fn one_plus(n: u32) -> AnalyticExpr {
    AnalyticExpr::real(1.0) + AnalyticExpr::pow(n)
}

/// Looks up a catalog entry by name.
///
/// Additive constants are dropped so every entry satisfies `h(0) = g(0) = 0`.
/// The Scherk singly-periodic entry uses `h = ¼L(z) - (i/4)L(iz)` and
/// `g = ¼L(z) + (i/4)L(iz)`, which gives `ω = z²`; the opposite assignment
/// gives `ω = 1/z²` and is sense-reversing. The 4-noid entry uses
/// `h + g = (1/8)(2z/(1+z²) + 3L(z))`, the sign that yields `ω = -z⁶`.
pub fn catalog(name: &str) -> Result<HarmonicMap> {
    let map = match name {
        "enneper" => HarmonicMap::new(
            name,
            AnalyticExpr::z(),
            AnalyticExpr::pow(3).scale_real(1.0 / 3.0),
            AnalyticExpr::z(),
            DEFAULT_R_MAX,
        ),
        "scherk-singly" => HarmonicMap::new(
            name,
            l().scale_real(0.25) - l_i().scale(c(0.0, 0.25)),
            l().scale_real(0.25) + l_i().scale(c(0.0, 0.25)),
            AnalyticExpr::z(),
            DEFAULT_R_MAX,
        ),
        "scherk-doubly" => HarmonicMap::new(
            name,
            l().scale_real(0.25) - l_i().scale(c(0.0, 0.25)),
            l().scale_real(-0.25) - l_i().scale(c(0.0, 0.25)),
            AnalyticExpr::z().scale(c(0.0, 1.0)),
            DEFAULT_R_MAX,
        ),
        "catenoid" => {
            let rational = || AnalyticExpr::z() / one_minus(2);
            HarmonicMap::new(
                name,
                l().scale_real(0.25) + rational().scale_real(0.5),
                l().scale_real(0.25) - rational().scale_real(0.5),
                AnalyticExpr::z().scale(c(0.0, 1.0)),
                DEFAULT_R_MAX,
            )
        }
        "enneper4" => HarmonicMap::new(
            name,
            AnalyticExpr::z(),
            AnalyticExpr::pow(7).scale_real(-1.0 / 7.0),
            AnalyticExpr::pow(3).scale(c(0.0, 1.0)),
            FOURFOLD_R_MAX,
        ),
        "noid4" => {
            let sum = || {
                ((AnalyticExpr::z().scale_real(2.0) / one_plus(2)) + l().scale_real(3.0))
                    .scale_real(0.125)
            };
            let diff = || {
                (AnalyticExpr::z() / one_minus(2)).scale_real(0.25) - l_i().scale(c(0.0, 0.375))
            };
            HarmonicMap::new(
                name,
                (sum() + diff()).scale_real(0.5),
                (sum() - diff()).scale_real(0.5),
                AnalyticExpr::pow(3).scale(c(0.0, 1.0)),
                FOURFOLD_R_MAX,
            )
        }
        other => return Err(Error::UnknownName(other.to_string())),
    }?;
    Ok(map)
}

/// Symbolic form of the catalog dilatation, for listings.
pub fn catalog_dilatation_label(name: &str) -> Option<&'static str> {
    match name {
        "enneper" | "scherk-singly" => Some("z^2"),
        "scherk-doubly" | "catenoid" => Some("-z^2"),
        "enneper4" | "noid4" => Some("-z^6"),
        _ => None,
    }
}

/// Grid used by the dilatation-equality precondition.
pub fn precondition_grid(a: &HarmonicMap, b: &HarmonicMap) -> DiskGrid {
    DiskGrid::new(10, 20, 0.9 * a.r_max().min(b.r_max())).expect("valid grid")
}

/// `(1-s)·a + s·b`, defined when `a` and `b` share a dilatation; inherits `a`'s `q`.
pub fn combine(a: &HarmonicMap, b: &HarmonicMap, s: f64) -> Result<HarmonicMap> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("combination parameter {s} outside [0, 1]")));
    }
    let (gap, _) = dilatation_gap(a, b, &precondition_grid(a, b))?;
    if gap > COMBINE_DILATATION_TOL {
        return Err(Error::DilatationMismatch { max_gap: gap, tolerance: COMBINE_DILATATION_TOL });
    }
    combine_unchecked(a, b, s)
}

pub(crate) fn combine_unchecked(a: &HarmonicMap, b: &HarmonicMap, s: f64) -> Result<HarmonicMap> {
    let wa = c(1.0 - s, 0.0);
    let wb = c(s, 0.0);
    let h = AnalyticExpr::linear_combination(vec![(wa, a.h.clone()), (wb, b.h.clone())]);
    let g = AnalyticExpr::linear_combination(vec![(wa, a.g.clone()), (wb, b.g.clone())]);
    let name = format!("{}~{}@{}", a.name, b.name, s);
    HarmonicMap::new(name, h, g, a.q.clone(), a.r_max.min(b.r_max))
}

/// Builds `h = ∫p`, `g = ∫pq²` from Weierstrass data with analytic `q`.
pub fn from_pq(p: AnalyticExpr, q: AnalyticExpr) -> Result<HarmonicMap> {
    from_pq_with_nodes(p, q, DEFAULT_NODES)
}

pub fn from_pq_with_nodes(p: AnalyticExpr, q: AnalyticExpr, nodes: usize) -> Result<HarmonicMap> {
    let r_max = p.r_max().min(q.r_max());
    let g_prime = p.clone() * q.clone() * q.clone();
    let h = p.antiderivative(nodes)?;
    let g = g_prime.antiderivative(nodes)?;
    HarmonicMap::new("from_pq", h, g, q, r_max)
}

/// Endpoints plus an ordered schedule of combination parameters.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub endpoint_a: HarmonicMap,
    pub endpoint_b: HarmonicMap,
    parameters: Vec<f64>,
}

impl FamilySpec {
    pub fn new(a: HarmonicMap, b: HarmonicMap, parameters: Vec<f64>) -> Result<Self> {
        if parameters.is_empty() {
            return Err(Error::InvalidArgument("empty parameter schedule".into()));
        }
        if parameters.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(Error::InvalidArgument("schedule values must lie in [0, 1]".into()));
        }
        if parameters.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument("schedule must be sorted".into()));
        }
        Ok(FamilySpec { endpoint_a: a, endpoint_b: b, parameters })
    }

    /// `steps` equally spaced parameters `i/(steps-1)`.
    pub fn uniform(a: HarmonicMap, b: HarmonicMap, steps: usize) -> Result<Self> {
        let params = match steps {
            0 => return Err(Error::InvalidArgument("steps must be >= 1".into())),
            1 => vec![0.0],
            n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        };
        Self::new(a, b, params)
    }

    pub fn parameters(&self) -> &[f64] {
        &self.parameters
    }

    pub fn name(&self) -> String {
        format!("{}-to-{}", self.endpoint_a.name(), self.endpoint_b.name())
    }

    pub fn r_max(&self) -> f64 {
        self.endpoint_a.r_max().min(self.endpoint_b.r_max())
    }
}

/// Angle helper for callers that want the imaginary direction.
pub const IMAGINARY_DIRECTION: f64 = PI / 2.0;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn catalog_rejects_unknown_names() {
        assert!(matches!(catalog("helicoid"), Err(Error::UnknownName(_))));
        for name in CATALOG_NAMES {
            assert_eq!(catalog(name).unwrap().name(), name);
        }
    }

    #[test]
    fn enneper_derivatives_and_dilatation() {
        let f = catalog("enneper").unwrap();
        let (dh, dg) = f.derivatives(c(0.5, 0.0)).unwrap();
        assert_eq!(dh, c(1.0, 0.0));
        assert_abs_diff_eq!(dg.re, 0.25, epsilon = 1e-16);
        assert_abs_diff_eq!(f.dilatation(c(0.5, 0.0)).unwrap().re, 0.25, epsilon = 1e-16);
    }

    #[test]
    fn catalog_dilatation_examples() {
        let cat = catalog("catenoid").unwrap();
        assert!(close(cat.dilatation(c(0.0, 0.5)).unwrap(), c(0.25, 0.0), 1e-15));
        let doubly = catalog("scherk-doubly").unwrap();
        assert!(close(doubly.dilatation(c(0.5, 0.0)).unwrap(), c(-0.25, 0.0), 1e-15));
        let e4 = catalog("enneper4").unwrap();
        assert!(close(e4.dilatation(c(0.5, 0.0)).unwrap(), c(-0.015625, 0.0), 1e-16));
        let n4 = catalog("noid4").unwrap();
        assert!(close(n4.dilatation(c(0.5, 0.0)).unwrap(), c(-0.015625, 0.0), 1e-15));
    }

    #[test]
    fn noid4_dilatation_is_minus_z6_at_many_points() {
        // brute-force oracle: g'/h' evaluated from the expression trees
        let f = catalog("noid4").unwrap();
        for k in 0..100 {
            let r = 0.9 * (k as f64 + 0.5) / 100.0;
            let z = Complex64::from_polar(r, 0.37 * k as f64);
            let w = f.dilatation(z).unwrap();
            assert!(close(w, -z.powu(6), 1e-13), "z = {z}: {w}");
        }
    }

    #[test]
    fn eval_map_examples() {
        let f = catalog("enneper").unwrap();
        assert!(close(f.eval(c(0.5, 0.0)).unwrap(), c(0.5 + 0.125 / 3.0, 0.0), 1e-15));
        assert!(close(f.eval(c(0.0, 0.5)).unwrap(), c(0.0, 0.5 + 0.125 / 3.0), 1e-15));
        for name in CATALOG_NAMES {
            assert_eq!(catalog(name).unwrap().eval(c(0.0, 0.0)).unwrap().norm(), 0.0, "{name}");
        }
    }

    #[test]
    fn dilatation_pole_guard() {
        let f = HarmonicMap::new(
            "flat",
            AnalyticExpr::pow(2),
            AnalyticExpr::zero(),
            AnalyticExpr::zero(),
            0.9,
        )
        .unwrap();
        assert!(matches!(f.dilatation(c(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(f.eval(c(0.95, 0.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn shears() {
        let f = catalog("enneper").unwrap();
        let plus = f.shear(PI / 2.0);
        assert_eq!(plus, AnalyticExpr::z() + AnalyticExpr::pow(3).scale_real(1.0 / 3.0));
        let minus = f.shear(0.0);
        assert!(close(minus.eval(c(0.5, 0.0)).unwrap(), c(0.5 - 0.125 / 3.0, 0.0), 1e-16));
        let d = catalog("scherk-doubly").unwrap().shear(PI / 2.0).derivative();
        assert!(close(d.eval(c(0.0, 0.0)).unwrap(), c(1.0, 0.0), 1e-16));
        let z = c(0.3, -0.4);
        assert!(close(d.eval(z).unwrap(), (c(1.0, 0.0) + z * z).inv(), 1e-15));
    }

    #[test]
    fn combine_endpoints_are_exact() {
        let e = catalog("enneper").unwrap();
        let s = catalog("scherk-singly").unwrap();
        let f0 = combine(&e, &s, 0.0).unwrap();
        assert_eq!(f0.h(), e.h());
        assert_eq!(f0.g(), e.g());
        let f1 = combine(&e, &s, 1.0).unwrap();
        assert_eq!(f1.h(), s.h());
        assert_eq!(f1.g(), s.g());
        let half = combine(&e, &s, 0.5).unwrap();
        assert!(close(half.dilatation(c(0.0, 0.3)).unwrap(), c(-0.09, 0.0), 1e-15));
        assert_eq!(half.q(), e.q());
    }

    #[test]
    fn combine_rejects_mismatched_dilatations() {
        let e = catalog("enneper").unwrap();
        let d = catalog("scherk-doubly").unwrap();
        assert!(matches!(combine(&e, &d, 0.5), Err(Error::DilatationMismatch { .. })));
        assert!(combine(&e, &e, 1.5).is_err());
    }

    #[test]
    fn from_pq_examples() {
        let ident = from_pq(AnalyticExpr::real(1.0), AnalyticExpr::zero()).unwrap();
        assert_eq!(ident.h(), &AnalyticExpr::z().with_r_max(DEFAULT_R_MAX));
        assert_eq!(ident.g().eval(c(0.4, 0.2)).unwrap(), c(0.0, 0.0));

        let enn = from_pq(AnalyticExpr::real(1.0), AnalyticExpr::z()).unwrap();
        let reference = catalog("enneper").unwrap();
        for z in [c(0.5, 0.0), c(-0.2, 0.7), c(0.0, -0.9)] {
            assert!(close(enn.eval(z).unwrap(), reference.eval(z).unwrap(), 1e-15));
        }

        let p = AnalyticExpr::real(1.0) / one_minus(4);
        let doubly = from_pq(p, AnalyticExpr::z().scale(c(0.0, 1.0))).unwrap();
        let printed = catalog("scherk-doubly").unwrap();
        let (dh, _) = doubly.derivatives(c(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(dh.re, 1.0 / (1.0 - 0.0625), epsilon = 1e-15);
        for z in [c(0.5, 0.0), c(0.3, 0.6), c(-0.8, -0.1)] {
            assert!(close(doubly.h().eval(z).unwrap(), printed.h().eval(z).unwrap(), 1e-13));
            assert!(close(doubly.g().eval(z).unwrap(), printed.g().eval(z).unwrap(), 1e-13));
        }
    }

    #[test]
    fn family_spec_validation() {
        let e = catalog("enneper").unwrap();
        let s = catalog("scherk-singly").unwrap();
        assert!(FamilySpec::new(e.clone(), s.clone(), vec![0.5, 0.2]).is_err());
        assert!(FamilySpec::new(e.clone(), s.clone(), vec![-0.1]).is_err());
        let fam = FamilySpec::uniform(e, s, 6).unwrap();
        assert_eq!(fam.parameters().len(), 6);
        assert_abs_diff_eq!(fam.parameters()[1], 0.2);
        assert_eq!(fam.parameters()[5], 1.0);
        assert_eq!(fam.name(), "enneper-to-scherk-singly");
    }

    #[test]
    fn json_round_trip_rebuilds_derivatives() {
        let f = catalog("catenoid").unwrap();
        let back = HarmonicMap::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.dh(), f.dh());
    }
}
