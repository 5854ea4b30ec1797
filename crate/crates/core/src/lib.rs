//! False discovery rate estimation with parametric threshold curves.
//!
//! The central object is a monotone decreasing local-fdr curve `fdr(y)` over a
//! nonnegative test statistic `y`, paired with a known null density `f0`. Two
//! families are provided:
//!
//! * **BUM**: uniform null on `[0, 1]` (1-p scale) with
//!   `fdr(y|s) = s / (s + a(1-s)(1-y)^(a-1))`, `a = 0.001` fixed, `eta0 = s`.
//! * **HND**: standard half-normal null with `fdr(y|s) = 1` for `y <= s` and
//!   `exp(-(y-s)^2/2)` beyond, where `s` acts as a decision threshold.
//!
//! From the pair `(f0, fdr)` everything else follows: the marginal density
//! `f = eta0 * f0 / fdr`, the null proportion `eta0 = (integral of f0/fdr)^-1`,
//! and the tail-area Fdr `eta0 * (1 - F0) / (1 - F)` (the q-value curve).
//!
//! Modules:
//!
//! * [`numerics`]: special functions, adaptive quadrature, Brent root finding,
//!   Nelder-Mead minimization. Self-contained, no external math dependencies.
//! * [`models`]: the BUM and HND families, scale transformations between
//!   p-values / z-scores / native statistics, and batch scoring.
//! * [`fitting`]: plug-in construction from externally supplied `(eta0, sigma)`
//!   and empirical-null maximum likelihood over `(s, sigma)`.
//! * [`simulate`]: deterministic scenario generator with an exact truth oracle.
//! * [`evaluate`]: simulation study runner comparing estimated fdr/Fdr curves
//!   against the truth, with per-repetition error summaries.
//! * [`cli`]: the `fdrthresh` command line front end.

pub mod cli;
pub mod evaluate;
pub mod fitting;
pub mod models;
pub mod numerics;
pub mod simulate;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A root bracket does not contain a sign change.
    #[error("bracket error: {0}")]
    NoBracket(String),

    /// Adaptive quadrature exhausted its depth budget; `estimate` is the best
    /// value obtained before giving up.
    #[error("quadrature did not converge (best estimate {estimate})")]
    Quadrature { estimate: f64 },

    /// Malformed or unusable user input (files, flags, batches).
    #[error("input error: {0}")]
    Input(String),

    /// An internal identity was violated by more than floating-point slack;
    /// indicates a bug rather than bad input.
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
