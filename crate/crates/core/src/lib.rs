//! Concatenation flow maps for the Steane [[7,1,3]] code.
//!
//! The crate turns per-location failure probabilities at one level of
//! concatenation into the failure probabilities of the rectangles that replace
//! them at the next level. Iterating that map separates rate vectors that flow
//! to zero (below threshold) from those that flow to one.
//!
//! * [`model`] is the nonlocal five-component map.
//! * [`local`] is the eight-component map for a machine where a two-qubit gate
//!   first has to move one encoded block a distance `r`.
//! * [`flow`] iterates either map, bisects thresholds, solves for the unstable
//!   fixed point and sweeps the transit error-correction frequency.
//! * [`analytic`] holds the closed-form threshold estimate and the sparseness
//!   recursion that backs it.
//! * [`catalog`] holds the location counts of the error-correction networks.

pub mod analytic;
pub mod catalog;
mod error;
pub mod flow;
pub mod local;
pub mod model;

pub use error::{Error, Result};
