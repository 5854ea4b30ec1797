//! Adaptive Simpson quadrature.
//!
//! Each panel is accepted when the Richardson comparison |S2 - S1| <= 15 tol,
//! where S1 is Simpson on the panel and S2 the two-half refinement; the
//! returned value is the extrapolated S2 + (S2 - S1)/15, which is exact for
//! polynomials up to degree 3 on a panel and one order better than S2 in
//! general. Tolerance is split in half per subdivision so the panel errors
//! sum to the requested bound.
//!
//! An infinite upper limit is handled by truncation: every integrand in this
//! crate decays at least exponentially, so the scan doubles the span until
//! the integrand magnitude falls below `abs_tol`, leaving a discarded tail
//! bounded by abs_tol / (decay rate) which is within the requested budget.

use crate::{Error, Result};

/// Tolerances and depth budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_depth: 50,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_depth < 1 {
            return Err(Error::Domain("quadrature max_depth must be >= 1".into()));
        }
        Ok(())
    }
}

/// Integrate `f` over `[lo, hi]`; `hi` may be `f64::INFINITY`.
///
/// The result is within `max(abs_tol, rel_tol * |I|)` of the true integral
/// for smooth integrands. Depth exhaustion on any panel aborts with
/// [`Error::Quadrature`] carrying the best estimate assembled so far.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !lo.is_finite() {
        return Err(Error::Domain(format!("lower limit must be finite, got {lo}")));
    }
    let hi = if hi == f64::INFINITY {
        truncation_point(&f, lo, spec.abs_tol)
    } else if hi.is_finite() {
        hi
    } else {
        return Err(Error::Domain(format!("upper limit must be finite or +inf, got {hi}")));
    };
    if hi == lo {
        return Ok(0.0);
    }
    if hi < lo {
        return integrate(f, hi, lo, spec).map(|v| -v);
    }

    // first Simpson pass over the whole interval seeds the recursion
    let fa = f(lo);
    let fb = f(hi);
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    // scale-aware tolerance: the relative part uses the crude first estimate
    let tol = spec.abs_tol.max(spec.rel_tol * whole.abs());
    let mut converged = true;
    let value = panel(&f, lo, hi, fa, fm, fb, whole, tol, spec.max_depth, &mut converged);
    if converged {
        Ok(value)
    } else {
        Err(Error::Quadrature { estimate: value })
    }
}

// Recursion never aborts early: exhausted panels keep their extrapolated
// value and clear `converged`, so the error can carry the full-interval
// best estimate rather than one stray panel.
#[allow(clippy::too_many_arguments)]
fn panel<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    converged: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let s2 = left + right;
    if !s2.is_finite() {
        // NaN/inf can never pass the acceptance test, so recursing would
        // visit the entire depth budget; refinement cannot repair it either
        *converged = false;
        return s2;
    }
    let err = s2 - whole;
    if err.abs() <= 15.0 * tol || b - m <= f64::EPSILON * m.abs() {
        return s2 + err / 15.0;
    }
    if depth == 0 {
        *converged = false;
        return s2 + err / 15.0;
    }
    let half_tol = 0.5 * tol;
    let l = panel(f, a, m, fa, flm, fm, left, half_tol, depth - 1, converged);
    let r = panel(f, m, b, fm, frm, fb, right, half_tol, depth - 1, converged);
    l + r
}

// Doubling scan for a truncation point U with |f(U)| < abs_tol. Probes the
// midpoint of the last doubled step too, so a momentary zero of the
// integrand cannot end the scan early.
fn truncation_point<F: Fn(f64) -> f64>(f: &F, lo: f64, abs_tol: f64) -> f64 {
    let mut step = 1.0;
    let mut hi = lo + step;
    for _ in 0..64 {
        if f(hi).abs() < abs_tol && f(hi - 0.5 * step).abs() < abs_tol {
            return hi;
        }
        step *= 2.0;
        hi = lo + step;
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal::norm_pdf;

    fn default_spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn unit_constant() {
        let v = integrate(|_| 1.0, 0.0, 1.0, &default_spec()).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_on_cubics() {
        // Simpson with Richardson extrapolation is exact for degree <= 3
        let v = integrate(|x| 4.0 * x * x * x - 3.0 * x * x + 2.0 * x - 1.0, -1.0, 2.0, &default_spec())
            .unwrap();
        let exact = (16.0 - 8.0 + 4.0 - 2.0) - (1.0 + 1.0 + 1.0 + 1.0);
        assert!((v - exact).abs() <= 1e-12, "v={v} exact={exact}");
    }

    #[test]
    fn half_normal_normalizes() {
        let v = integrate(|y| 2.0 * norm_pdf(y), 0.0, f64::INFINITY, &default_spec()).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "v={v}");
    }

    #[test]
    fn oscillatory_smooth() {
        // integral of sin over [0, pi] = 2
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, &default_spec()).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_limits_negate() {
        let a = integrate(|x| x, 0.0, 1.0, &default_spec()).unwrap();
        let b = integrate(|x| x, 1.0, 0.0, &default_spec()).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn depth_exhaustion_reports_estimate() {
        let spec = QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            max_depth: 2,
        };
        let err = integrate(|x| (-x).exp() * x.sin().abs(), 0.0, 30.0, &spec).unwrap_err();
        match err {
            Error::Quadrature { estimate } => assert!(estimate.is_finite()),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_fails_fast() {
        // would otherwise recurse through the full 2^50 panel tree
        let err = integrate(
            |x| if x < 1.0 { 1.0 } else { f64::NAN },
            0.0,
            2.0,
            &default_spec(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
        // 0 * inf = NaN appearing only past the truncation scan's horizon
        let err = integrate(
            |x| norm_pdf(x) * (x * x / 2.0).exp(),
            0.0,
            f64::INFINITY,
            &default_spec(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(integrate(|_| 1.0, 0.0, 1.0, &spec).is_err());
    }
}
