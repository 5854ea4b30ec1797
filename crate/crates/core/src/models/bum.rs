//! Beta-uniform mixture threshold model.
//!
//! Native statistic y lives on [0, 1] (y = 1 - p on the p-value scale).
//! The null is uniform: f0 = 1, F0 = y. The local fdr family is
//!
//! ```text
//! fdr(y|s) = s / (s + a (1-s) (1-y)^(a-1)),   a = 0.001 fixed
//! ```
//!
//! which makes the null proportion the parameter itself: eta0 = s. The
//! marginal, alternative, and tail quantities all follow in closed form:
//!
//! ```text
//! f(y)  = eta0 + a (1-eta0) (1-y)^(a-1)
//! fA(y) = a (1-y)^(a-1),          FA(y) = 1 - (1-y)^a
//! F(y)  = eta0 y + (1-eta0) FA(y)
//! Fdr(y) = eta0 / (eta0 + (1-eta0) (1-y)^(a-1))
//! ```
//!
//! The shape constant `a` is part of the family definition, never fitted.
//! For z-scores the native transform is y = 2 Phi(|z|/sigma) - 1.

use crate::numerics::normal::{ln_norm_pdf_scaled, SQRT_2};
use crate::numerics::{erf, ln_erfc};
use crate::{Error, Result};

/// Fixed shape constant of the fdr family.
pub const A_SHAPE: f64 = 0.001;

/// Pointwise density/distribution bundle returned by [`BumModel::densities`].
#[derive(Debug, Clone, Copy)]
pub struct BumDensities {
    pub f0: f64,
    pub f_alt: f64,
    pub f: f64,
    pub cdf0: f64,
    pub cdf_alt: f64,
    pub cdf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumModel {
    s: f64,
    sigma: f64,
}

impl BumModel {
    /// `s` is the null proportion, in (0, 1]; `sigma` scales z-scores only.
    pub fn new(s: f64, sigma: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Domain(format!("BUM s must be in (0, 1], got {s}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("sigma must be positive and finite, got {sigma}")));
        }
        Ok(BumModel { s, sigma })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// eta0 = s, an identity of this family.
    pub fn eta0(&self) -> f64 {
        self.s
    }

    pub(crate) fn check_y(y: f64) -> Result<f64> {
        if !(y >= 0.0 && y <= 1.0) {
            return Err(Error::Domain(format!("BUM native y must be in [0, 1], got {y}")));
        }
        Ok(y)
    }

    /// (1-y)^(a-1), the reweighting kernel; >= 1 on [0, 1), +inf at y = 1.
    fn kernel(y: f64) -> f64 {
        (1.0 - y).powf(A_SHAPE - 1.0)
    }

    /// Local fdr at native y in [0, 1]. Exactly 1 for the pure-null model;
    /// the y = 1 endpoint returns the limit 0.
    pub fn local_fdr(&self, y: f64) -> Result<f64> {
        let y = Self::check_y(y)?;
        if self.s == 1.0 {
            return Ok(1.0);
        }
        if y == 1.0 {
            return Ok(0.0);
        }
        let w = Self::kernel(y);
        Ok(self.s / (self.s + A_SHAPE * (1.0 - self.s) * w))
    }

    /// Tail-area Fdr (q-value curve) at native y.
    ///
    /// The denominator is arranged as `w + eta0 (1 - w)` rather than the
    /// textbook `eta0 + (1-eta0) w`: at y = 0 the kernel w is exactly 1 and
    /// the former makes Fdr(0) = eta0 bit-exact, while the latter rounds
    /// eta0 + (1-eta0) to 1 +- 1ulp for some eta0.
    pub fn tail_fdr(&self, y: f64) -> Result<f64> {
        let y = Self::check_y(y)?;
        if self.s == 1.0 {
            return Ok(1.0);
        }
        if y == 1.0 {
            return Ok(0.0);
        }
        let w = Self::kernel(y);
        crate::models::clamp_unit(self.s / (w + self.s * (1.0 - w)), "BUM tail Fdr")
    }

    /// Null, alternative, and marginal densities and distributions at y.
    /// The alternative density is genuinely singular at y = 1 (it serializes
    /// as +inf); the distributions stay finite with F(1) = 1.
    pub fn densities(&self, y: f64) -> Result<BumDensities> {
        let y = Self::check_y(y)?;
        let eta0 = self.s;
        let one_minus_y_pow_a = (1.0 - y).powf(A_SHAPE);
        let f_alt = A_SHAPE * Self::kernel(y);
        let cdf_alt = 1.0 - one_minus_y_pow_a;
        let f = if eta0 == 1.0 {
            1.0 // zero alternative weight; avoids 0 * inf at y = 1
        } else {
            eta0 + (1.0 - eta0) * f_alt
        };
        Ok(BumDensities {
            f0: 1.0,
            f_alt,
            f,
            cdf0: y,
            cdf_alt,
            cdf: eta0 * y + (1.0 - eta0) * cdf_alt,
        })
    }

    /// Survival 1 - F(y) without cancellation near y = 1.
    pub fn survival(&self, y: f64) -> Result<f64> {
        let y = Self::check_y(y)?;
        let one_minus_y = 1.0 - y;
        Ok(self.s * one_minus_y + (1.0 - self.s) * one_minus_y.powf(A_SHAPE))
    }

    /// Native statistic from a raw value on the given scale.
    /// p-values: y = 1 - p. z-scores: y = 2 Phi(|z|/sigma) - 1, computed as
    /// erf(|z| / (sigma sqrt(2))) to keep precision near y = 0.
    pub fn to_native_y(&self, x: f64, scale: crate::models::StatisticScale) -> Result<f64> {
        use crate::models::StatisticScale::*;
        match scale {
            PValue => {
                if !(x >= 0.0 && x <= 1.0) {
                    return Err(Error::Domain(format!("p-value must be in [0, 1], got {x}")));
                }
                Ok(1.0 - x)
            }
            ZScore => {
                if !x.is_finite() {
                    return Err(Error::Domain(format!("z-score must be finite, got {x}")));
                }
                Ok(erf(x.abs() / (self.sigma * SQRT_2)))
            }
            NativeY => Self::check_y(x),
        }
    }

    /// log of the z-scale marginal density
    /// f(z) = eta0 * phi(z; 0, sigma) / fdr(y(z)),
    /// with log fdr evaluated analytically so that deep tails (where the
    /// kernel overflows and fdr underflows to 0) stay finite:
    /// log fdr = log s - logaddexp(log s, log a + log(1-s) + (a-1) log(1-y))
    /// and log(1-y) = log erfc(|z| / (sigma sqrt(2))).
    pub fn log_marginal_z(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("z-score must be finite, got {z}")));
        }
        let ln_phi = ln_norm_pdf_scaled(z, self.sigma);
        if self.s == 1.0 {
            return Ok(ln_phi); // eta0 = 1, fdr = 1
        }
        let ln_one_minus_y = ln_erfc(z.abs() / (self.sigma * SQRT_2));
        let ln_s = self.s.ln();
        let other = A_SHAPE.ln() + (1.0 - self.s).ln() + (A_SHAPE - 1.0) * ln_one_minus_y;
        let ln_fdr = ln_s - logaddexp(ln_s, other);
        Ok(ln_s + ln_phi - ln_fdr)
    }

    /// Numerical check of the normalization identity: integrates f0/fdr over
    /// the native scale, which analytically equals 1/eta0.
    ///
    /// A direct pass over y is impossible in doubles: with a = 0.001 the
    /// singular weight (1-y)^(a-1) hides 96% of its mass beyond the last
    /// representable point below 1. The exact substitution t = (1-y)^a turns
    /// the integrand into the smooth (1/a) t^(1/a - 1) + (1-s)/s on [0, 1].
    pub fn integral_f0_over_fdr(&self, spec: &crate::numerics::QuadratureSpec) -> Result<f64> {
        let s = self.s;
        let inv_a = 1.0 / A_SHAPE;
        crate::numerics::integrate(
            |t: f64| inv_a * t.powf(inv_a - 1.0) + (1.0 - s) / s,
            0.0,
            1.0,
            spec,
        )
    }

    /// Same identity exercised on the z-score scale:
    /// integral over [0, inf) of 2 phi(z; 0, sigma) / fdr(y(z)) dz = 1/eta0.
    ///
    /// Assembled in log space throughout: past |z|/sigma ~ 38 the kernel
    /// overflows while the folded null underflows, and multiplying the raw
    /// pieces would hand the quadrature 0 * inf = NaN.
    pub fn integral_f0_over_fdr_zscale(
        &self,
        spec: &crate::numerics::QuadratureSpec,
    ) -> Result<f64> {
        let m = *self;
        crate::numerics::integrate(
            move |z: f64| {
                let ln_null = std::f64::consts::LN_2 + ln_norm_pdf_scaled(z, m.sigma);
                let null_part = ln_null.exp();
                if m.s == 1.0 {
                    return null_part;
                }
                let ln_w = (A_SHAPE - 1.0) * ln_erfc(z / (m.sigma * SQRT_2));
                let ln_alt = (A_SHAPE * (1.0 - m.s) / m.s).ln() + ln_null + ln_w;
                null_part + ln_alt.exp()
            },
            0.0,
            f64::INFINITY,
            spec,
        )
    }
}

fn logaddexp(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}
