//! Curvature operators of explicitly given Riemannian metrics, with numerical checks of
//! the curvature relations that hold along the soul of a nonnegatively curved open
//! manifold.

// `!(x > limit)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bivector;
pub mod error;
pub mod geometry;
pub mod integral;
pub mod report;
pub mod sampling;
pub mod soul;
pub mod tolerances;
pub mod zoo;

pub use error::{Error, Result};
