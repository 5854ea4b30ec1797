//! Brent's method: bisection safeguarded by secant / inverse quadratic
//! interpolation. Converges when |f| <= 1e-12 or the bracket has shrunk to
//! 1e-12; never evaluates or returns a point outside the initial bracket.

use crate::{Error, Result};

const F_TOL: f64 = 1e-12;
const X_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;

/// Root of `f` inside `[lo, hi]`; requires a sign change on the bracket.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::NoBracket(format!(
            "no sign change on [{lo}, {hi}]: f(lo)={fa}, f(hi)={fb}"
        )));
    }
    // b holds the best iterate, a the previous one, c the counterpoint
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * X_TOL;
        let m = 0.5 * (c - b);
        if fb.abs() <= F_TOL || m.abs() <= tol {
            return Ok(b);
        }
        if e.abs() < tol || fa.abs() <= fb.abs() {
            // interpolation unusable, fall back to bisection
            d = m;
            e = m;
        } else {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                // secant
                (2.0 * m * s, 1.0 - s)
            } else {
                // inverse quadratic
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            // accept the step only if it stays well inside the bracket and
            // shrinks faster than the previous one
            if 2.0 * p < 3.0 * m * q - (tol * q).abs() && p < (0.5 * e * q).abs() {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal::norm_cdf;

    #[test]
    fn sqrt_two() {
        let r = brent_root(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-9, "r={r}");
    }

    #[test]
    fn cdf_median() {
        let r = brent_root(|x| norm_cdf(x).unwrap() - 0.5, -1.0, 1.0).unwrap();
        assert!(r.abs() < 1e-9);
    }

    #[test]
    fn root_at_endpoint() {
        assert_eq!(brent_root(|x| x, 0.0, 5.0).unwrap(), 0.0);
        assert_eq!(brent_root(|x| x - 5.0, 0.0, 5.0).unwrap(), 5.0);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(brent_root(|x| x * x + 1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn stays_inside_bracket() {
        // steep and ill-scaled on purpose
        let (lo, hi) = (1e-4, 10.0);
        let f = |x: f64| (x.ln() + 3.0) * (x + 1.0).powi(3);
        let r = brent_root(f, lo, hi).unwrap();
        assert!(r >= lo && r <= hi);
        assert!((r - (-3.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn nasty_flat_function() {
        // f is flat near the root: |f| <= 1e-12 is reached anywhere within
        // (1e-12)^(1/9) ~ 0.047 of the root, and that is the contract
        let r = brent_root(|x: f64| (x - 1.0).powi(9), 0.0, 3.0).unwrap();
        assert!((r - 1.0).powi(9).abs() <= 1e-12 || (r - 1.0).abs() <= 1e-12);
        assert!((r - 1.0).abs() < 5e-2, "r={r}");
    }
}
