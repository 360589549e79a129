//! Geometry and measure toolkit for discrete groups acting on products of
//! hyperbolic planes.
//!
//! Layers, bottom to top:
//!
//! - [`plane`]: the upper half-plane model of H² (distance, geodesics,
//!   projections, Busemann cocycles, shadows).
//! - [`product`]: products `Z = H² × ⋯ × H²` with vector-valued distance and
//!   Busemann cocycles.
//! - [`alignment`]: alignment predicates, contracting and squeezing checks,
//!   axis constants and the extension candidate search.
//! - [`groups`]: word balls of finitely generated subgroups, Cartan and
//!   Jordan projections, spectra, limit cones and transversality diagnostics.
//! - [`measures`]: Poincaré series, critical exponents, atomic conformal
//!   densities and Burger–Roblin box measures on `∂Z × ℝʳ`.
//! - [`verify`]: seeded verification suites and the export pipeline.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alignment;
pub mod error;
pub mod groups;
pub mod measures;
pub mod plane;
pub mod product;
pub mod sampling;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
