//! Special functions shared by the rest of the crate: `ln Γ`, Gamma ratios,
//! Gegenbauer polynomials and Gauss–Jacobi rules for the symmetric weight
//! `(1 − t²)^α`.

mod gamma;
mod gegenbauer;
mod quadrature;

pub use gamma::{gamma_ratio, log_gamma, sphere_area};
pub use gegenbauer::gegenbauer;
pub use quadrature::{gauss_jacobi, QuadratureRule1D};

pub(crate) use gamma::{gamma_ratio_unchecked, lgamma};
pub(crate) use gegenbauer::gegenbauer_unchecked;
