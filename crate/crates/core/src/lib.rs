//! Quantum mechanics of a particle confined to a curved submanifold.
//!
//! The crate compares the quantization schemes for constrained free motion:
//! Dirac-bracket quantization of the embedded system, thin-layer confinement
//! and its variants. It provides symbolic scalar fields, the extrinsic
//! geometry of level sets, the bracket algebra, the resulting geometric
//! potentials, and numerical thin-layer spectra.

pub mod brackets;
pub mod conversion;
pub mod fieldexpr;
pub mod geometry;
pub mod linalg;
pub mod potentials;
pub mod spectral;

pub use fieldexpr::{FieldError, FieldExpr, ParseError};
pub use geometry::{CurvatureFrame, GeometryError, SurfaceSpec};
