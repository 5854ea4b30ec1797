//! Half-normal decay threshold model.
//!
//! Native statistic y lives on [0, inf) (y = |z|/sigma on the z-score scale,
//! y = Phi^-1(1 - p/2) on the p-value scale). The null is standard
//! half-normal: f0 = sqrt(2/pi) exp(-y^2/2), F0 = 2 Phi(y) - 1. The local
//! fdr family keeps a plateau up to the threshold s, then decays:
//!
//! ```text
//! fdr(y|s) = 1                      for y <= s
//!          = exp(-(y-s)^2 / 2)      for y >  s
//! ```
//!
//! The null proportion is a derived quantity,
//!
//! ```text
//! eta0(s) = ( 2 Phi(s) - 1 + sqrt(2/pi) exp(-s^2/2 - log s) )^-1,
//! ```
//!
//! strictly increasing in s, which makes s <-> eta0 a bijection.
//!
//! Above the threshold the marginal simplifies to
//! f(y) = eta0 sqrt(2/pi) exp(s^2/2 - s y), and the survival function to
//!
//! ```text
//! 1 - F(y) = eta0 sqrt(2/pi) exp(s^2/2 - log s - s y)      (y > s)
//! ```
//!
//! exactly (the constant terms cancel against the eta0 identity). Both the
//! distribution and the tail Fdr are computed from this form: it is immune
//! to cancellation for large y, and F(inf) = 1 falls out analytically,
//! which pins the sign of the exp(-s^2) term in the two-branch F formula.

use crate::numerics::normal::SQRT_2;
use crate::numerics::{brent_root, erf, erfc};
use crate::{Error, Result};

/// Smallest admissible threshold; keeps the log s term of eta0 finite.
pub const S_MIN: f64 = 1e-4;

/// Upper end of the bracket used when inverting eta0 -> s; eta0(50) is
/// already 1.0 to the last bit of a double.
pub const S_INVERSION_MAX: f64 = 50.0;

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_36;

/// Pointwise density/distribution bundle returned by [`HndModel::densities`].
#[derive(Debug, Clone, Copy)]
pub struct HndDensities {
    pub f0: f64,
    pub f_alt: f64,
    pub f: f64,
    pub cdf0: f64,
    pub cdf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HndModel {
    s: f64,
    sigma: f64,
    eta0: f64, // cached eta0(s)
}

impl HndModel {
    /// `s` is the fdr cut-off threshold in half-normal units, >= S_MIN;
    /// `sigma` scales z-scores only.
    pub fn new(s: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("sigma must be positive and finite, got {sigma}")));
        }
        let eta0 = Self::eta0_from_s(s)?;
        Ok(HndModel { s, sigma, eta0 })
    }

    /// Construct from a target null proportion by inverting eta0(s).
    pub fn from_eta0(eta0: f64, sigma: f64) -> Result<Self> {
        Self::new(Self::s_from_eta0(eta0)?, sigma)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    /// eta0(s) by the closed form; strictly increasing, (0, 1].
    pub fn eta0_from_s(s: f64) -> Result<f64> {
        if !(s >= S_MIN) || !s.is_finite() {
            return Err(Error::Domain(format!("HND s must be finite and >= {S_MIN}, got {s}")));
        }
        // 2 Phi(s) - 1 = erf(s / sqrt(2)), full precision near s = 0
        let den = erf(s / SQRT_2) + SQRT_2_OVER_PI * (-s * s / 2.0 - s.ln()).exp();
        Ok(1.0 / den)
    }

    /// Invert eta0(s) over [S_MIN, 50]. The attainable range is
    /// (eta0(S_MIN), 1); eta0 = 1 is only reached in the s -> inf limit and
    /// is rejected.
    pub fn s_from_eta0(eta0: f64) -> Result<f64> {
        let eta0_min = Self::eta0_from_s(S_MIN).unwrap();
        if !(eta0 > eta0_min && eta0 < 1.0) {
            return Err(Error::Domain(format!(
                "HND eta0 must be in ({eta0_min:.6e}, 1) exclusive, got {eta0}"
            )));
        }
        brent_root(
            |s| Self::eta0_from_s(s).unwrap() - eta0,
            S_MIN,
            S_INVERSION_MAX,
        )
    }

    pub(crate) fn check_y(y: f64) -> Result<f64> {
        if y.is_nan() || y < 0.0 {
            return Err(Error::Domain(format!("HND native y must be >= 0, got {y}")));
        }
        Ok(y)
    }

    /// Local fdr at native y >= 0: 1 on the plateau, Gaussian decay beyond.
    pub fn local_fdr(&self, y: f64) -> Result<f64> {
        let y = Self::check_y(y)?;
        if y <= self.s {
            Ok(1.0)
        } else {
            let d = y - self.s;
            Ok((-d * d / 2.0).exp())
        }
    }

    /// Survival 1 - F(y), exact branch form (no cancellation for large y).
    pub fn survival(&self, y: f64) -> Result<f64> {
        let y = Self::check_y(y)?;
        if y <= self.s {
            Ok(1.0 - self.eta0 * erf(y / SQRT_2))
        } else {
            Ok(self.eta0 * SQRT_2_OVER_PI * (self.s * self.s / 2.0 - self.s.ln() - self.s * y).exp())
        }
    }

    /// Tail-area Fdr: eta0 (1 - F0(y)) / (1 - F(y)), with
    /// 1 - F0(y) = erfc(y / sqrt(2)).
    pub fn tail_fdr(&self, y: f64) -> Result<f64> {
        let y = Self::check_y(y)?;
        if y.is_infinite() {
            return Ok(0.0); // both tails vanish; the null tail vanishes faster
        }
        let num = self.eta0 * erfc(y / SQRT_2);
        let den = self.survival(y)?;
        if den == 0.0 {
            // survival underflowed; the true ratio is far below any double
            return Ok(0.0);
        }
        crate::models::clamp_unit(num / den, "HND tail Fdr")
    }

    /// Null, alternative, and marginal densities plus F0 and F at y.
    pub fn densities(&self, y: f64) -> Result<HndDensities> {
        let y = Self::check_y(y)?;
        let eta0 = self.eta0;
        let f0 = SQRT_2_OVER_PI * (-y * y / 2.0).exp();
        let cdf0 = erf(y / SQRT_2);
        let (f, f_alt) = if y <= self.s {
            (eta0 * f0, 0.0)
        } else {
            let f = eta0 * SQRT_2_OVER_PI * (self.s * self.s / 2.0 - self.s * y).exp();
            let f_alt = if eta0 == 1.0 {
                0.0 // the alternative carries no mass
            } else {
                (f - eta0 * f0) / (1.0 - eta0)
            };
            (f, f_alt)
        };
        Ok(HndDensities {
            f0,
            f_alt,
            f,
            cdf0,
            cdf: 1.0 - self.survival(y)?,
        })
    }

    /// Native statistic from a raw value on the given scale.
    /// p-values are two-sided: y = Phi^-1(1 - p/2), computed as
    /// -Phi^-1(p/2) so that small p keeps full relative precision (going
    /// through 1 - p/2 would round away the tail and cost ~7 decimal digits
    /// at p ~ 1e-9). z-scores: y = |z| / sigma.
    pub fn to_native_y(&self, x: f64, scale: crate::models::StatisticScale) -> Result<f64> {
        use crate::models::StatisticScale::*;
        match scale {
            PValue => {
                if !(x >= 0.0 && x <= 1.0) {
                    return Err(Error::Domain(format!("p-value must be in [0, 1], got {x}")));
                }
                let half = x / 2.0;
                if half == 0.0 {
                    return Ok(f64::INFINITY);
                }
                Ok(-crate::numerics::norm_quantile(half)?)
            }
            ZScore => {
                if !x.is_finite() {
                    return Err(Error::Domain(format!("z-score must be finite, got {x}")));
                }
                Ok(x.abs() / self.sigma)
            }
            NativeY => Self::check_y(x),
        }
    }

    /// log of the z-scale marginal density
    /// f(z) = eta0 * phi(z; 0, sigma) / fdr(y(z)); log fdr is analytic
    /// (0 on the plateau, -(y-s)^2/2 beyond), so no exp-then-log ever.
    pub fn log_marginal_z(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("z-score must be finite, got {z}")));
        }
        let y = z.abs() / self.sigma;
        let ln_phi = crate::numerics::normal::ln_norm_pdf_scaled(z, self.sigma);
        let neg_ln_fdr = if y <= self.s {
            0.0
        } else {
            let d = y - self.s;
            d * d / 2.0
        };
        Ok(self.eta0.ln() + ln_phi + neg_ln_fdr)
    }

    /// Numerical check of the normalization identity: integrates f0/fdr over
    /// [0, inf), which analytically equals 1/eta0. Split at the plateau edge
    /// so the derivative kink never lands inside a panel.
    pub fn integral_f0_over_fdr(&self, spec: &crate::numerics::QuadratureSpec) -> Result<f64> {
        let s = self.s;
        let plateau = crate::numerics::integrate(
            |y: f64| SQRT_2_OVER_PI * (-y * y / 2.0).exp(),
            0.0,
            s,
            spec,
        )?;
        let tail = crate::numerics::integrate(
            move |y: f64| SQRT_2_OVER_PI * (s * s / 2.0 - s * y).exp(),
            s,
            f64::INFINITY,
            spec,
        )?;
        Ok(plateau + tail)
    }

    /// Same identity exercised on the z-score scale:
    /// integral over [0, inf) of 2 phi(z; 0, sigma) / fdr(y(z)) dz = 1/eta0.
    pub fn integral_f0_over_fdr_zscale(
        &self,
        spec: &crate::numerics::QuadratureSpec,
    ) -> Result<f64> {
        let s = self.s;
        let sigma = self.sigma;
        let edge = s * sigma;
        let plateau = crate::numerics::integrate(
            move |z: f64| 2.0 * crate::numerics::norm_pdf(z / sigma) / sigma,
            0.0,
            edge,
            spec,
        )?;
        // 2 phi(z/sigma)/sigma * exp((z/sigma - s)^2 / 2) in assembled form:
        // the naive product is 0 * inf = NaN once z/sigma passes ~38
        let tail = crate::numerics::integrate(
            move |z: f64| SQRT_2_OVER_PI / sigma * (s * s / 2.0 - s * z / sigma).exp(),
            edge,
            f64::INFINITY,
            spec,
        )?;
        Ok(plateau + tail)
    }
}
