//! Special functions: Γ, the Mittag-Leffler function and the fractional
//! relaxation kernels.

pub mod gamma;
pub mod kernels;
pub mod mittag_leffler;
pub mod oracle;

pub use kernels::{relaxation_kernel, step_response, FracOrder, Kernels};
pub use mittag_leffler::{ml_eval, MittagLeffler, MlParams};
pub use oracle::ml_oracle;
