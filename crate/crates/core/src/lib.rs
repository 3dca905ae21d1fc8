//! Measured-metric-space laboratory: model geometries with exact distances,
//! Monte Carlo estimators of large-sphere statistics, convex-body volume
//! comparisons, and the arithmetic of coarse distance formulas.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coarse;
pub mod error;
pub mod finsler;
pub mod rng;
pub mod space;
pub mod stats;

pub use error::{Error, Result};
