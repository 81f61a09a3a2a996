//! Cesàro–Riesz summability tools and the spectral densities and Green
//! kernels of a handful of exactly solvable operators.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod error;
pub mod kernels;
pub mod numerics;
pub mod operators;
pub mod spectral;
pub mod summability;
pub mod testfn;

pub use error::{Error, Result};
