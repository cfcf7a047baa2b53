//! Heckman–Opdam hypergeometric functions on small root systems, the
//! hypergeometric Fourier transform, and the heat / Segal–Bargmann transform
//! built on top of them.
//!
//! Everything lives in a fixed two-dimensional orthonormal frame; rank-one
//! systems simply leave the second coordinate at zero.

pub mod config;
pub mod error;
pub mod even_case;
pub mod heat;
pub mod hypergeo;
pub mod io;
pub mod rootsys;
pub mod special;
pub mod testfn;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};

/// Real vector in the orthonormal frame of the Cartan subspace (or its dual).
pub type Vector = nalgebra::Vector2<f64>;
/// Complexified vector.
pub type CVector = nalgebra::Vector2<num_complex::Complex64>;
/// Linear map on the Cartan subspace, used for Weyl group elements.
pub type Matrix = nalgebra::Matrix2<f64>;

pub use num_complex::Complex64;

pub(crate) fn complexify(v: &Vector) -> CVector {
    CVector::new(Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0))
}

/// Complex-bilinear pairing of a complex vector with a real one.
pub(crate) fn cdot(z: &CVector, v: &Vector) -> Complex64 {
    z[0] * v[0] + z[1] * v[1]
}
