//! Numerical laboratory for shrinking-ball mean values of subharmonic
//! functions.
//!
//! Subharmonic functions are built from Riesz data (a finite nonnegative
//! atomic measure plus a harmonic polynomial), measures are finite atom
//! clouds, and every limit statement is turned into a finite-scale study
//! with an explicit report.
//!
//! Modules:
//! * [`kernel`]: the kernel `g`, its inverse and normalisation constants.
//! * [`measure`]: atom measures, surface samplers, Cantor sets, densities.
//! * [`potential`]: Riesz functions, sphere means, sub-mean checks, layer cake.
//! * [`admissible`]: gauge functions and the admissibility tests.
//! * [`meanvalue`]: mean values, convergence, comparison, proof bounds.
//! * [`counterexample`]: the co-dimension-2 construction in R^3.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissible;
pub mod counterexample;
mod error;
mod ext;
pub mod field;
pub mod kernel;
pub mod meanvalue;
pub mod measure;
pub mod numeric;
mod point;
pub mod potential;
pub mod report;
pub mod scenarios;

pub use admissible::{AdmissibilityReport, GaugeFunction, Verdict};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use field::{Field, FunctionSpec};
pub use kernel::{kernel_g, kernel_g_inv, riesz_normalization, unit_sphere_area, Dimension};
pub use meanvalue::{ConvergenceReport, EpsSchedule, ProofBoundConfig};
pub use measure::{DiscreteMeasure, SurfaceSpec};
pub use point::Point;
pub use potential::{HarmonicSpec, RieszFunction};
