//! Construction and certification of projectivized limit cones for
//! multi-Fuchsian representations of surface groups into (PSL₂ℝ)³.
//!
//! The crate builds representations from explicit simple-closed-curve data
//! (trace coordinates for the one-holed torus, right-angled polygon chains
//! for closed surfaces), assembles the convex hull of the projectivized
//! multi-lengths of the simple curves, certifies boundary facets as
//! azimuthal, and cross-checks every certificate against brute-force clouds
//! of Jordan projections of group elements.

pub mod cone;
pub mod config;
pub mod fricke;
pub mod hyp2;
pub mod polygons;
pub mod report;
pub mod scalar;
pub mod scenario;
pub mod svg;
pub mod wordgen;

pub use scalar::Scalar;
