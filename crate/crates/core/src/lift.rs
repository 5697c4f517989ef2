//! Minimal-surface lift `z -> (Re{h+g}, Im{h-g}, 2 Im ∫_0^z h'q dζ)`.
//!
//! `√(h'g')` is always taken as `h'q`; the stored `q` fixes the branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::GaussLegendre;
use crate::criteria::{dilatation_gap, DiskGrid};
use crate::error::{Error, Result};
use crate::mappings::{combine_unchecked, precondition_grid, FamilySpec, HarmonicMap, COMBINE_DILATATION_TOL};
use crate::surface::{build_mesh, SurfaceMesh};

/// A point of ℝ³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl SurfacePoint {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        SurfacePoint { x1, x2, x3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn distance(&self, other: &SurfacePoint) -> f64 {
        let d = [self.x1 - other.x1, self.x2 - other.x2, self.x3 - other.x3];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }
}

/// `∫ h'q dζ` along the polyline through `path`.
pub fn height_potential_along(f: &HarmonicMap, path: &[Complex64], nodes: usize) -> Result<Complex64> {
    if nodes < 2 {
        return Err(Error::InvalidArgument(format!("quadrature needs >= 2 nodes, got {nodes}")));
    }
    let rule = GaussLegendre::cached(nodes);
    let mut acc = Complex64::new(0.0, 0.0);
    for w in path.windows(2) {
        for end in w {
            if end.norm() >= f.r_max() {
                return Err(Error::domain(*end, f.r_max()));
            }
        }
        acc += rule.integrate_segment(w[0], w[1], |zeta| f.height_integrand(zeta))?;
    }
    Ok(acc)
}

pub fn lift_point(f: &HarmonicMap, z: Complex64, nodes: usize) -> Result<SurfacePoint> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= f.r_max() {
        return Err(Error::domain(z, f.r_max()));
    }
    let h = f.h().eval(z)?;
    let g = f.g().eval(z)?;
    let potential = height_potential_along(f, &[Complex64::new(0.0, 0.0), z], nodes)?;
    let p = SurfacePoint::new((h + g).re, (h - g).im, 2.0 * potential.im);
    if !p.is_finite() {
        return Err(Error::NonFinite { re: z.re, im: z.im });
    }
    Ok(p)
}

fn atanh_log(w: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    ((one + w) / (one - w)).ln()
}

/// Closed-form parametrizations of the catalog surfaces, evaluated directly.
///
/// The Scherk singly-periodic second coordinate is `Im{-(i/2)L(iz)}`, the
/// mirror image of the more common `Im{(i/2)log((i-z)/(i+z))}`, because the
/// catalog orients that entry so its dilatation is `z²`.
pub fn closed_form_oracle(name: &str, z: Complex64) -> Result<SurfacePoint> {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let r_max = match name {
        "enneper4" | "noid4" => crate::mappings::FOURFOLD_R_MAX,
        _ => crate::analytic::DEFAULT_R_MAX,
    };
    if z.norm() >= r_max {
        return Err(Error::domain(z, r_max));
    }
    let z2 = z * z;
    let p = match name {
        "enneper" => {
            let z3 = z2 * z;
            SurfacePoint::new((z + z3 / 3.0).re, (z - z3 / 3.0).im, z2.im)
        }
        "scherk-singly" => SurfacePoint::new(
            (atanh_log(z) * 0.5).re,
            (-i * 0.5 * atanh_log(i * z)).im,
            (atanh_log(z2) * 0.5).im,
        ),
        "scherk-doubly" => SurfacePoint::new(
            (-i * 0.5 * atanh_log(i * z)).re,
            (atanh_log(z) * 0.5).im,
            (i * 0.5 * atanh_log(z2)).im,
        ),
        "catenoid" => SurfacePoint::new(
            (atanh_log(z) * 0.5).re,
            (z / (one - z2)).im,
            (one / (one - z2)).re - 1.0,
        ),
        "enneper4" => {
            let z4 = z2 * z2;
            let z7 = z4 * z2 * z;
            SurfacePoint::new((z - z7 / 7.0).re, (z + z7 / 7.0).im, 0.5 * z4.re)
        }
        "noid4" => {
            let z4 = z2 * z2;
            let sum = (z * 2.0 / (one + z2) + atanh_log(z) * 3.0) / 8.0;
            let diff = z / (one - z2) / 4.0 - i * 0.375 * atanh_log(i * z);
            SurfacePoint::new(sum.re, diff.im, 0.5 * ((one / (one - z4)).re - 1.0))
        }
        other => return Err(Error::UnknownName(other.to_string())),
    };
    Ok(p)
}

/// Lifts every member `(1-s)·a + s·b` of the family over `grid`.
pub fn lift_family(spec: &FamilySpec, grid: &DiskGrid, nodes: usize) -> Result<Vec<(f64, SurfaceMesh)>> {
    let (a, b) = (&spec.endpoint_a, &spec.endpoint_b);
    let (gap, _) = dilatation_gap(a, b, &precondition_grid(a, b))?;
    if gap > COMBINE_DILATATION_TOL {
        return Err(Error::DilatationMismatch { max_gap: gap, tolerance: COMBINE_DILATATION_TOL });
    }
    spec.parameters()
        .iter()
        .map(|&s| {
            let member = family_member(spec, s)?;
            Ok((s, build_mesh(&member, grid, nodes)?))
        })
        .collect()
}

/// The combination at parameter `s`, named after the family.
pub fn family_member(spec: &FamilySpec, s: f64) -> Result<HarmonicMap> {
    let member = combine_unchecked(&spec.endpoint_a, &spec.endpoint_b, s)?;
    Ok(member.renamed(format!("{}@{}", spec.name(), s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::DEFAULT_NODES;
    use crate::mappings::catalog;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn enneper_lift_examples() {
        let f = catalog("enneper").unwrap();
        assert_eq!(lift_point(&f, c(0.0, 0.0), 64).unwrap(), SurfacePoint::new(0.0, 0.0, 0.0));
        let p = lift_point(&f, c(0.0, 0.5), 64).unwrap();
        assert_abs_diff_eq!(p.x1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.x2, 13.0 / 24.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.x3, 0.0, epsilon = 1e-15);
        let p = lift_point(&f, c(0.5, 0.5), 64).unwrap();
        assert_abs_diff_eq!(p.x3, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn scherk_singly_on_real_axis() {
        let f = catalog("scherk-singly").unwrap();
        let p = lift_point(&f, c(0.5, 0.0), 64).unwrap();
        assert_abs_diff_eq!(p.x1, 0.5 * 3.0_f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.x2, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.x3, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn catenoid_oracle_examples() {
        assert_eq!(closed_form_oracle("catenoid", c(0.0, 0.0)).unwrap(), SurfacePoint::new(0.0, 0.0, 0.0));
        let p = closed_form_oracle("catenoid", c(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(p.x3, 1.0 / 3.0, epsilon = 1e-15);
        let p = closed_form_oracle("enneper", c(0.0, 0.5)).unwrap();
        assert_abs_diff_eq!(p.x2, 13.0 / 24.0, epsilon = 1e-15);
        assert!(matches!(closed_form_oracle("torus", c(0.1, 0.0)), Err(Error::UnknownName(_))));
        assert!(closed_form_oracle("catenoid", c(0.995, 0.0)).is_err());
    }

    #[test]
    fn lift_matches_every_oracle() {
        for name in crate::mappings::CATALOG_NAMES {
            let f = catalog(name).unwrap();
            for k in 0..20 {
                let z = Complex64::from_polar(0.85 * (k as f64 + 1.0) / 20.0, 0.9 * k as f64);
                let got = lift_point(&f, z, DEFAULT_NODES).unwrap();
                let want = closed_form_oracle(name, z).unwrap();
                assert!(got.distance(&want) < 1e-10, "{name} at {z}: {got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn path_independence() {
        let f = catalog("catenoid").unwrap();
        let z = c(0.6, 0.5);
        let radial = height_potential_along(&f, &[c(0.0, 0.0), z], 64).unwrap();
        for sign in [1.0, -1.0] {
            let mid = z * 0.5 * c(1.0, 0.1 * sign);
            let bent = height_potential_along(&f, &[c(0.0, 0.0), mid, z], 64).unwrap();
            assert!((bent - radial).norm() < 1e-12);
        }
    }

    #[test]
    fn lift_rejects_points_outside_the_disk() {
        let f = catalog("noid4").unwrap();
        assert!(matches!(lift_point(&f, c(0.96, 0.0), 64), Err(Error::Domain { .. })));
        assert!(lift_point(&f, c(0.5, 0.0), 1).is_err());
    }

    #[test]
    fn family_requires_equal_dilatations() {
        let spec = FamilySpec::uniform(catalog("enneper").unwrap(), catalog("catenoid").unwrap(), 3).unwrap();
        let grid = DiskGrid::new(2, 8, 0.5).unwrap();
        assert!(matches!(lift_family(&spec, &grid, 16), Err(Error::DilatationMismatch { .. })));
    }
}
