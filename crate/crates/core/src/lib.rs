//! Complex volumes of Dehn fillings of cusped 3-manifolds, computed from
//! σ-deformed Ptolemy varieties on an ordered ideal triangulation.
//!
//! The pipeline runs [`complex`] → [`cocycle`] → [`ptolemy`] /
//! [`peripheral`] → [`flattening`] → [`dilog`]; [`pipeline`] wires the
//! stages together for the command line front end.

pub mod cocycle;
pub mod complex;
pub mod dilog;
mod error;
pub mod flattening;
mod linalg;
pub mod monomial;
pub mod peripheral;
pub mod pipeline;
pub mod ptolemy;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub(crate) const PI: f64 = std::f64::consts::PI;

/// `πi`.
pub(crate) fn pi_i() -> Complex64 {
    Complex64::new(0.0, PI)
}
