//! Squeezed states that saturate the Schrödinger–Robertson uncertainty relation.
//!
//! The crate is organised around a handful of closed forms (parametrization,
//! wavefunctions, overlap kernels, SU(1,1) disentangling) and the brute-force
//! oracles used to check them (truncated Fock matrices and Gaussian quadrature).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bch;
pub mod config;
pub mod error;
pub mod fock;
pub mod hermite;
pub mod kernels;
pub mod linalg;
pub mod mp;
pub mod mutation;
pub mod params;
pub mod quadrature;
pub mod symbol;
pub mod verify;
pub mod wavefn;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use params::{Constants, DerivedAngles, Labels, Moments};
