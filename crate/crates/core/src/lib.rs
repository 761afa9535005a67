//! Shifted Lucas wavelets and a tau method for second-order initial and
//! boundary value problems, including Lane–Emden and pantograph equations.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod lucas_poly;
pub mod op_matrices;
pub mod poly;
pub mod quadrature;
pub mod tau_solver;
pub mod verify;
pub mod wavelet_basis;

pub use error::{Error, Result};
pub use lucas_poly::ComplexScalar;
pub use wavelet_basis::{BasisConfig, CoefficientVector, WaveletBasis, WaveletIndex};
