//! Invariant geometry of the Aloff–Wallach spaces `SU(3)/T_{k,l}` with the
//! one-parameter family of metrics `g_t`, and of their circle-fiber
//! projection onto the flag manifold `SU(3)/T`.
//!
//! Layers, bottom up:
//!
//! - [`matrix`]: 3×3 complex matrices, the bracket and trace form of 𝔰𝔲(3).
//! - [`space`]: the reductive splitting, the deformed metric, frames and
//!   structure constants.
//! - [`curvature`]: Levi-Civita connection, curvature tensor, sectional
//!   curvature and randomized positivity scans.
//! - [`submersion`]: κ-coefficients, tension field, conformality and the
//!   harmonic-morphism verdict.
//! - [`report`]: serializable records for the command-line front end.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod error;
pub mod matrix;
pub mod report;
pub mod space;
pub mod submersion;

pub use error::GeometryError;
pub use space::{AwParams, AwSpace};
