//! Numerical laboratory for the fractional conductivity inverse problem with
//! partial exterior data.
//!
//! The crate discretizes `R^n` (n = 1, 2) on a truncated lattice, assembles
//! the nonlocal conductivity and Schrödinger forms, computes exterior
//! Dirichlet-to-Neumann maps as Schur complements, checks the structural
//! identities that connect the two equations, and runs stability sweeps and
//! regularized reconstructions.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the bottom of this module fix the scalar to `f64`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dnmap;
pub mod error;
pub mod forms;
pub mod fracops;
pub mod geometry;
pub mod io;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GridDomain64 = geometry::GridDomain<f64>;
pub type KernelWeights64 = fracops::KernelWeights<f64>;
pub type SobolevMetric64 = fracops::SobolevMetric<f64>;
pub type ConductivityField64 = forms::ConductivityField<f64>;
pub type NonlocalForm64 = forms::NonlocalForm<f64>;
pub type DnMap64 = dnmap::DnMap<f64>;

pub type GridDomain32 = geometry::GridDomain<f32>;
pub type KernelWeights32 = fracops::KernelWeights<f32>;
pub type NonlocalForm32 = forms::NonlocalForm<f32>;
pub type DnMap32 = dnmap::DnMap<f32>;
