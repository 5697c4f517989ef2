//! Planar harmonic mappings, their univalence and directional-convexity
//! criteria, and their lifts to minimal surfaces in ℝ³.
//!
//! A mapping `f = h + conj(g)` carries an analytic square root `q` of its
//! dilatation `g'/h'`. The lift
//! `z -> (Re{h+g}, Im{h-g}, 2 Im ∫_0^z h'q dζ)` is an isothermal
//! parametrization of a minimal surface whenever `f` is univalent.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod par;

pub use analytic::{AnalyticExpr, ComplexValue, Jet, Order};
pub use error::{Error, Result};
pub mod criteria;
pub mod mappings;

pub use criteria::{CriterionReport, DiskGrid};
pub use mappings::{catalog, combine, from_pq, FamilySpec, HarmonicMap};
pub mod lift;
pub mod surface;

pub use lift::{closed_form_oracle, lift_family, lift_point, SurfacePoint};
pub use surface::{build_mesh, SurfaceMesh};
