//! Self-contained numerical kernel: special functions, adaptive quadrature,
//! bracketed root finding, and derivative-free minimization.
//!
//! Everything here is a pure function of its arguments with no internal
//! randomness or shared state, so callers may invoke any of it concurrently.

mod erf;
pub mod normal;
mod optimize;
mod quadrature;
mod root;

pub use erf::{erf, erfc, ln_erfc};
pub use normal::{norm_cdf, norm_pdf, norm_quantile};
pub use optimize::{nelder_mead, MinimizeResult, OptimizerSpec};
pub use quadrature::{integrate, QuadratureSpec};
pub use root::brent_root;
