//! Approximation of planar shapes by filled Julia sets of explicitly
//! constructed polynomials.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! 1. [`geometry`]: load a bitmap into a [`ShapeMask`], optionally regularize
//!    it, translate so an interior point sits at 0, and sample its boundary.
//! 2. [`potential`]: greedy Leja points on the boundary, the capacity
//!    estimate `a_n^{1/n}` and the empirical Green's function.
//! 3. [`polyjulia`]: the polynomial `z·e^{−ns/2}·cap^{−n}·∏(z − z_j)`, its
//!    exponent-tracked evaluation and escape classification.
//! 4. [`render`]: escape-time rasters of the filled Julia set and their
//!    comparison with the target shape.

pub mod complex_serde;
pub mod geometry;
pub mod polyjulia;
pub mod potential;
pub mod raster;
pub mod render;
pub mod scaled;

pub use geometry::{BoundarySample, HausdorffMode, PlaneWindow, RadialBounds, ShapeMask};
pub use polyjulia::{ConditionReport, SLevel, ShapedPolynomial};
pub use potential::{FeketeTuple, LejaSequence, PotentialField};
pub use raster::PixelGrid;
pub use render::JuliaRaster;
pub use scaled::ScaledComplex;
