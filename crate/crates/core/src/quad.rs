//! Adaptive Simpson quadrature for complex-valued integrands on a finite
//! interval, with an absolute error target.

use crate::error::{Error, Result};
use crate::linalg::C64;

const MAX_DEPTH: usize = 60;

/// Integrate f over [a, b] to absolute tolerance `abs_tol`.
pub fn integrate_complex<F>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature(format!(
            "interval [{a}, {b}] must be finite"
        )));
    }
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, abs_tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: C64, fm: C64, fb: C64) -> C64 {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: C64,
    fm: C64,
    fb: C64,
    whole: C64,
    tol: f64,
    depth: usize,
) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "recursion limit hit on [{a}, {b}] with residual {:.3e}",
            delta.norm()
        )));
    }
    let l = adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}
