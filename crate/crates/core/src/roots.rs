//! Bracketed scalar root finding: bisection with one secant probe per step.

use crate::error::{Error, Result};

/// Iteration cap of [`bracketed_root`].
pub const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    /// Final bracket `(lo, hi)` with a sign change of `f`.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Root of `f` in `[lo, hi]`, which must carry a sign change.
///
/// Each iteration tries the secant point of the current bracket, then halves
/// whatever bracket remains, so the width at least halves every step. Stops
/// once the bracket is narrower than `rel_tol * |x|` or `f` vanishes.
pub fn bracketed_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> Result<Root> {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (mut fa, mut fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) || fa * fb > 0.0 {
        return Err(Error::BracketFailure);
    }
    let done = |a: f64, b: f64| b - a <= rel_tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut iterations = 0;
    while fa != 0.0 && fb != 0.0 && !done(a, b) && iterations < MAX_ITER {
        iterations += 1;
        let s = b - fb * (b - a) / (fb - fa);
        if s > a && s < b {
            let fs = f(s);
            if fs == 0.0 {
                return Ok(Root {
                    x: s,
                    fx: fs,
                    bracket: (a, b),
                    iterations,
                });
            }
            if (fs < 0.0) == (fa < 0.0) {
                a = s;
                fa = fs;
            } else {
                b = s;
                fb = fs;
            }
        }
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if (fm < 0.0) == (fa < 0.0) && fm != 0.0 {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let (x, fx) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    Ok(Root {
        x,
        fx,
        bracket: (a, b),
        iterations,
    })
}
