//! Small shared numerical routines: bracketed 1-D root finding.

use crate::error::{Error, Result};

/// Bracketed root finder: bisection with secant acceleration.
///
/// Requires `f(lo)` and `f(hi)` to have opposite signs. Each iteration tries a
/// secant step from the current bracket endpoints and falls back to bisection
/// whenever the secant step leaves the bracket or stalls, so convergence is
/// guaranteed while simple roots still converge superlinearly.
pub(crate) fn find_root<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    x_tol: f64,
    context: &str,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracketing {
            context: context.to_string(),
            lo,
            hi,
        });
    }
    for iter in 0..200 {
        if (b - a).abs() <= x_tol {
            break;
        }
        // Secant proposal from the bracket endpoints on even iterations; a
        // pure bisection on odd ones guarantees the bracket at least halves
        // every two iterations even when the secant hugs one edge (as it
        // does on strongly curved functions).
        let mut x = if iter % 2 == 0 && fb != fa {
            b - fb * (b - a) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        let margin = 0.01 * (b - a).abs();
        if !x.is_finite() || x <= a.min(b) + margin || x >= a.max(b) - margin {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::Bracketing {
                context: format!("{context}: non-finite value at interior point {x:e}"),
                lo: a,
                hi: b,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    // Return the endpoint with the smaller residual.
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}
