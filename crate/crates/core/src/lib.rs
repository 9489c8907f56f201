//! Gap probabilities and large-deviation rate functions for the largest
//! eigenvalue of Hermitian matrix ensembles with polynomial potentials.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod potentials;
pub mod real;

pub use error::{Error, Result};
pub mod exec;
pub(crate) mod planar;
pub mod montecarlo;
pub mod orthopoly;
pub mod quadrature;
pub mod rate_functions;
pub mod spectral_curve;
pub mod verify;
