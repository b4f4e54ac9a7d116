//! Imaginary time propagation for 1-D Schrödinger eigenproblems with real
//! and complex-coefficient splitting methods on a periodic spectral grid.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod grid;
pub mod methods;
pub mod potentials;
pub mod propagator;
pub mod solver;

pub use error::{Error, Result};
