//! Numerical laboratory for the time-fractional diffusion problem
//! ∂_t^α u − Δu = f on the unit interval and unit square with homogeneous
//! Dirichlet data and zero initial value.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fem;
pub mod l1;
pub mod linalg;
pub mod par;
pub mod quadrature;
pub mod reference;
pub mod special;
pub mod spectral;
pub mod study;

pub use error::{Error, Result};
pub use par::Execution;
