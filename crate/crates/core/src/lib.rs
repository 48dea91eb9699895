//! Spectral analysis of Dirac-type boundary value problems
//!
//! `-i B^{-1} y' + Q(x) y = lambda y` on `[0, 1]`, `B = diag(b1, b2)` with
//! `b1 < 0 < b2`, and boundary conditions `C y(0) + D y(1) = 0`.
//!
//! The crate computes fundamental matrices, transformation-operator kernels,
//! characteristic determinants and their zeros, classifies boundary
//! conditions, builds biorthogonal root systems, and reduces the damped
//! Timoshenko beam to a 4x4 system of the same type.

pub mod basis;
pub mod determinant;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod problem;
pub mod propagator;
pub mod regularity;
pub mod spectra;
pub mod timoshenko;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
