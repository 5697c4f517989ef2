//! Sampled surfaces over the polar disk lattice and their differential checks.
//!
//! First partials of the lift come straight from `h'`, `g'` and `q`; only the
//! second partials used for the mean curvature are finite differences.

pub mod export;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::DEFAULT_NODES;
use crate::criteria::DiskGrid;
use crate::error::{Error, Result};
use crate::lift::{lift_point, SurfacePoint};
use crate::mappings::HarmonicMap;
use crate::par;

pub use export::{export, render, MeshFormat};

/// Central-difference step for second partials.
pub const CURVATURE_STEP: f64 = 1e-4;
/// Five-point stencil spacing for coordinate Laplacians.
pub const LAPLACIAN_STEP: f64 = 1e-3;

pub const ISO_RATIO_TOL: f64 = 1e-9;
pub const MEAN_CURVATURE_TOL: f64 = 1e-6;
pub const LAPLACIAN_TOL: f64 = 1e-5;

type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Tangent vectors `x_u`, `x_v` at `z = u + iv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstPartials {
    pub xu: Vec3,
    pub xv: Vec3,
}

impl FirstPartials {
    /// Exact partials from `h'`, `g'` and `h'q`.
    pub fn of(f: &HarmonicMap, z: Complex64) -> Result<Self> {
        let (dh, dg) = f.derivatives(z)?;
        let w = dh * f.q().eval(z)?;
        Ok(Self::from_derivatives(dh, dg, w))
    }

    fn from_derivatives(dh: Complex64, dg: Complex64, w: Complex64) -> Self {
        let s = dh + dg;
        let d = dh - dg;
        FirstPartials {
            xu: [s.re, d.im, 2.0 * w.im],
            xv: [-s.im, d.re, 2.0 * w.re],
        }
    }

    /// Conformal factor `|x_u|²`.
    pub fn lambda(&self) -> f64 {
        dot(self.xu, self.xu)
    }

    /// `max(|x_u·x_v|, ||x_u|² - |x_v|²|)`.
    pub fn iso_dev(&self) -> f64 {
        dot(self.xu, self.xv).abs().max((dot(self.xu, self.xu) - dot(self.xv, self.xv)).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexDiagnostics {
    pub lambda: f64,
    pub iso_dev: f64,
    /// `None` where the difference stencil would leave the validity disk.
    pub h_est: Option<f64>,
}

/// Mesh polygon over 0-based vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Face {
    Tri([usize; 3]),
    Quad([usize; 4]),
}

impl Face {
    pub fn indices(&self) -> &[usize] {
        match self {
            Face::Tri(v) => v,
            Face::Quad(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub name: String,
    pub grid: DiskGrid,
    pub vertices: Vec<SurfacePoint>,
    pub params: Vec<Complex64>,
    pub faces: Vec<Face>,
    pub diagnostics: Vec<VertexDiagnostics>,
}

impl SurfaceMesh {
    pub fn quad_count(&self) -> usize {
        self.faces.iter().filter(|f| matches!(f, Face::Quad(_))).count()
    }

    pub fn triangle_count(&self) -> usize {
        self.faces.iter().filter(|f| matches!(f, Face::Tri(_))).count()
    }

    /// Largest `iso_dev / λ` over vertices with `|z| <= radius`.
    pub fn max_iso_ratio(&self, radius: f64) -> f64 {
        self.params
            .iter()
            .zip(&self.diagnostics)
            .filter(|(z, _)| z.norm() <= radius)
            .map(|(_, d)| d.iso_dev / d.lambda)
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Triangle fan around the origin, then quads between consecutive rings.
pub fn lattice_faces(grid: &DiskGrid) -> Vec<Face> {
    let n = grid.n_theta;
    let mut faces = Vec::with_capacity(grid.n_r * n);
    for k in 0..n {
        faces.push(Face::Tri([0, grid.index_of(1, k), grid.index_of(1, (k + 1) % n)]));
    }
    for j in 1..grid.n_r {
        for k in 0..n {
            let k1 = (k + 1) % n;
            faces.push(Face::Quad([
                grid.index_of(j, k),
                grid.index_of(j + 1, k),
                grid.index_of(j + 1, k1),
                grid.index_of(j, k1),
            ]));
        }
    }
    faces
}

pub fn build_mesh(f: &HarmonicMap, grid: &DiskGrid, nodes: usize) -> Result<SurfaceMesh> {
    if grid.r_max >= f.r_max() {
        return Err(Error::domain(Complex64::new(grid.r_max, 0.0), f.r_max()));
    }
    let rows = par::try_map_range(grid.len(), |i| {
        let z = grid.point(i);
        let x = lift_point(f, z, nodes)?;
        let partials = FirstPartials::of(f, z)?;
        let h_est = if z.norm() + 2.0 * CURVATURE_STEP < f.r_max() {
            Some(mean_curvature_estimate(f, z, CURVATURE_STEP)?)
        } else {
            None
        };
        let diag = VertexDiagnostics { lambda: partials.lambda(), iso_dev: partials.iso_dev(), h_est };
        Ok::<_, Error>((z, x, diag))
    })?;
    let mut params = Vec::with_capacity(rows.len());
    let mut vertices = Vec::with_capacity(rows.len());
    let mut diagnostics = Vec::with_capacity(rows.len());
    for (z, x, d) in rows {
        params.push(z);
        vertices.push(x);
        diagnostics.push(d);
    }
    Ok(SurfaceMesh {
        name: f.name().to_string(),
        grid: *grid,
        vertices,
        params,
        faces: lattice_faces(grid),
        diagnostics,
    })
}

/// `|H|` from the fundamental forms, with second partials by central
/// differences of the exact first partials.
pub fn mean_curvature_estimate(f: &HarmonicMap, z: Complex64, step: f64) -> Result<f64> {
    if !(step > 0.0) || z.norm() + 2.0 * step >= f.r_max() {
        return Err(Error::domain(z, f.r_max()));
    }
    let du = Complex64::new(step, 0.0);
    let dv = Complex64::new(0.0, step);
    let center = FirstPartials::of(f, z)?;
    let pu = FirstPartials::of(f, z + du)?;
    let mu = FirstPartials::of(f, z - du)?;
    let pv = FirstPartials::of(f, z + dv)?;
    let mv = FirstPartials::of(f, z - dv)?;
    let inv = 1.0 / (2.0 * step);
    let xuu = scale(sub(pu.xu, mu.xu), inv);
    let xvv = scale(sub(pv.xv, mv.xv), inv);
    let xuv = scale(
        [
            sub(pv.xu, mv.xu)[0] + sub(pu.xv, mu.xv)[0],
            sub(pv.xu, mv.xu)[1] + sub(pu.xv, mu.xv)[1],
            sub(pv.xu, mv.xu)[2] + sub(pu.xv, mu.xv)[2],
        ],
        0.5 * inv,
    );
    Ok(mean_curvature_from_partials(center, xuu, xuv, xvv).abs())
}

/// `H = (EN - 2FM + GL) / (2(EG - F²))`.
pub fn mean_curvature_from_partials(p: FirstPartials, xuu: Vec3, xuv: Vec3, xvv: Vec3) -> f64 {
    let normal = cross(p.xu, p.xv);
    let len = dot(normal, normal).sqrt();
    let n = scale(normal, 1.0 / len);
    let (e, fm, g) = (dot(p.xu, p.xu), dot(p.xu, p.xv), dot(p.xv, p.xv));
    let (l, m, nn) = (dot(xuu, n), dot(xuv, n), dot(xvv, n));
    (e * nn - 2.0 * fm * m + g * l) / (2.0 * (e * g - fm * fm))
}

/// Largest five-point Laplacian magnitude over the three lift coordinates.
pub fn laplacian_residual(f: &HarmonicMap, z: Complex64, step: f64) -> Result<f64> {
    if !(step > 0.0) || z.norm() + step >= f.r_max() {
        return Err(Error::domain(z, f.r_max()));
    }
    laplacian_residual_of(|w| Ok(lift_point(f, w, DEFAULT_NODES)?.to_array()), z, step)
}

/// Same stencil applied to an arbitrary coordinate map.
pub fn laplacian_residual_of<F>(coords: F, z: Complex64, step: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Vec3>,
{
    let c = coords(z)?;
    let e = coords(z + Complex64::new(step, 0.0))?;
    let w = coords(z - Complex64::new(step, 0.0))?;
    let n = coords(z + Complex64::new(0.0, step))?;
    let s = coords(z - Complex64::new(0.0, step))?;
    let h2 = step * step;
    Ok((0..3)
        .map(|i| ((e[i] + w[i] + n[i] + s[i] - 4.0 * c[i]) / h2).abs())
        .fold(0.0, f64::max))
}

/// Deterministic uniform samples from the disk `|z| <= radius`.
pub fn random_disk_points(count: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let t = std::f64::consts::TAU * rng.gen::<f64>();
            Complex64::from_polar(r, t)
        })
        .collect()
}

/// Radius fraction (of the validity radius) for mean-curvature samples.
pub const CURVATURE_SAMPLE_FRACTION: f64 = 0.9;
/// Absolute radius for Laplacian samples, where the O(step²) stencil
/// truncation stays below [`LAPLACIAN_TOL`] for every catalog family.
pub const LAPLACIAN_SAMPLE_RADIUS: f64 = 0.25;
pub const MINIMALITY_SAMPLES: usize = 50;

/// Summary of the isothermality and minimality checks for one surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub max_iso_ratio: f64,
    pub max_mean_curvature: f64,
    pub max_laplacian: f64,
    pub samples: usize,
    pub passed: bool,
}

/// Samples `|H|` on `|z| <= 0.9·r_max` and the Laplacian residual on
/// `|z| <= LAPLACIAN_SAMPLE_RADIUS`, and reads `iso_dev/λ` off the mesh.
pub fn verify_minimality(f: &HarmonicMap, mesh: &SurfaceMesh, seed: u64) -> Result<MinimalityReport> {
    let r_max = f.r_max();
    let curvature_radius = CURVATURE_SAMPLE_FRACTION * r_max - 2.0 * CURVATURE_STEP;
    let lap_radius = LAPLACIAN_SAMPLE_RADIUS.min(r_max - 2.0 * LAPLACIAN_STEP);
    let hz = random_disk_points(MINIMALITY_SAMPLES, curvature_radius, seed);
    let lz = random_disk_points(MINIMALITY_SAMPLES, lap_radius, seed ^ 0x9e37_79b9_7f4a_7c15);
    let hs = par::try_map_range(hz.len(), |i| mean_curvature_estimate(f, hz[i], CURVATURE_STEP))?;
    let ls = par::try_map_range(lz.len(), |i| laplacian_residual(f, lz[i], LAPLACIAN_STEP))?;
    let max_mean_curvature = hs.into_iter().fold(0.0, f64::max);
    let max_laplacian = ls.into_iter().fold(0.0, f64::max);
    let max_iso_ratio = mesh.max_iso_ratio(CURVATURE_SAMPLE_FRACTION * r_max);
    Ok(MinimalityReport {
        max_iso_ratio,
        max_mean_curvature,
        max_laplacian,
        samples: MINIMALITY_SAMPLES,
        passed: max_iso_ratio <= ISO_RATIO_TOL
            && max_mean_curvature <= MEAN_CURVATURE_TOL
            && max_laplacian <= LAPLACIAN_TOL,
    })
}
