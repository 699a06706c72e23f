//! Scalar root refinement on a sign-changing bracket.

use crate::{Error, Result};

/// Refines a root of `f` inside `[a, b]` (with `f(a)`, `f(b)` of opposite
/// sign) by secant steps safeguarded with bisection. Stops when the bracket is
/// narrower than `rtol * |x|` or `f` vanishes exactly.
pub fn bisect_secant<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, rtol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Bracketing(format!(
            "f({a}) = {fa:e} and f({b}) = {fb:e} do not bracket a root"
        )));
    }
    for iter in 0..200 {
        let width = (b - a).abs();
        if width <= rtol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        // secant candidate, rejected when it leaves the central part of the bracket
        let mut x = b - fb * (b - a) / (fb - fa);
        let lo = a.min(b) + 0.05 * width;
        let hi = a.max(b) - 0.05 * width;
        if !(x > lo && x < hi) || iter % 4 == 3 {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    // final secant step inside the tight bracket
    let x = if fb != fa { b - fb * (b - a) / (fb - fa) } else { 0.5 * (a + b) };
    Ok(x.clamp(a.min(b), a.max(b)))
}

/// Marches from `start` in steps of `step` until `f` changes sign, then
/// refines. `limit` bounds the march.
pub fn march_and_refine<F: FnMut(f64) -> f64>(
    mut f: F,
    start: f64,
    step: f64,
    limit: f64,
    rtol: f64,
) -> Result<f64> {
    let mut a = start;
    let mut fa = f(a);
    while a < limit {
        let b = (a + step).min(limit);
        let fb = f(b);
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.signum() != fb.signum() {
            return bisect_secant(f, a, b, rtol);
        }
        a = b;
        fa = fb;
    }
    Err(Error::Bracketing(format!(
        "no sign change on [{start}, {limit}] with step {step}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = bisect_secant(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(matches!(
            bisect_secant(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::Bracketing(_))
        ));
    }

    #[test]
    fn march_finds_first_root() {
        let r = march_and_refine(f64::sin, 0.5, 0.1, 20.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::PI).abs() < 1e-13);
    }
}
