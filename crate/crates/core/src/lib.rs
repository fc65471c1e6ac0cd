//! Spectral laboratory for local smoothing estimates of one-dimensional
//! linear dispersive and dissipative evolution equations.

// `!(x > 0.0)` style checks deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod spectral;
pub mod symbols;
pub mod counterexamples;
pub mod propagator;
pub mod functionals;
pub mod experiments;

pub use error::{Error, Result};
