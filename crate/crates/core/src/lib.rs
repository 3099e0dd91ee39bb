//! Numerics for the fractional Nirenberg problem on `S^n`: special
//! functions, spectral fields on the sphere, the conformally covariant
//! operator `P_σ` and its Riesz inverse, the Sobolev quotient and its
//! identities, a subcritical minimizer with continuation to the critical
//! exponent, and a Nyström harness for linear integral equations on balls.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod specfun;
pub mod sphere;
pub mod conformal;
pub mod functionals;
pub mod solver;
pub mod local_estimates;
mod vecmath;

pub use error::{Error, Result};
