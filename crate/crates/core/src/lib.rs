//! Curved-layer slicing and grayscale cure-mask generation for DLP vat
//! photopolymerization.
//!
//! The pipeline samples a scalar field on a triangle mesh, extracts each of
//! its iso-levels as a set of 3D contour loops, projects every layer into
//! projector pixels and commands each interior pixel with the gray level
//! whose cure depth matches the local layer thickness.

// `!(a < b)` is deliberate throughout: NaN inputs must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod cure_mask;
pub mod cure_model;
pub mod mesh_io;
pub mod pipeline;
pub mod scalar_field;
pub mod slicer;
pub mod verify;

pub use config::RunConfig;
pub use pipeline::{run_pipeline, RunOutcome};
