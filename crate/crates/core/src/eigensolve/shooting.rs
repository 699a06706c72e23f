//! Radial shooting for the first angular mode on geodesic balls of space
//! forms.
//!
//! Solves `f'' + (N−1)(sn'/sn) f' + (μ − (N−1)/sn²) f = 0` on `(0, r)` with
//! `f ~ t` at the origin and `f'(r) = 0`.

use crate::geometry::spaceform::{cs, SpaceForm};
use crate::{roots, specfun, Error, Result};

/// Fixed RK4 steps across `[t₀, r]`.
pub const RK4_STEPS: usize = 2000;
/// The integration starts at `t₀ = r / START_FRACTION` from a Frobenius series.
pub const START_FRACTION: f64 = 50.0;

/// `f'(r)` for the trial eigenvalue `mu`.
pub fn boundary_slope(space: &SpaceForm, r: f64, mu: f64) -> f64 {
    let n1 = space.dim as f64 - 1.0;
    let k = space.k;
    let nf = space.dim as f64;
    // f = t + a t³ + b t⁵ near the regular singular point
    let a = (2.0 * n1 * k / 3.0 - mu) / (2.0 * (nf + 2.0));
    let b = (a * (4.0 * n1 * k / 3.0 - mu) + 4.0 * n1 * k * k / 45.0) / (4.0 * (nf + 4.0));
    let t0 = r / START_FRACTION;
    let mut f = t0 + a * t0.powi(3) + b * t0.powi(5);
    let mut df = 1.0 + 3.0 * a * t0 * t0 + 5.0 * b * t0.powi(4);
    let rhs = |t: f64, f: f64, df: f64| {
        let sn = space.sn(t);
        -n1 * cs(k, t) / sn * df - (mu - n1 / (sn * sn)) * f
    };
    let h = (r - t0) / RK4_STEPS as f64;
    let mut t = t0;
    for _ in 0..RK4_STEPS {
        let k1f = df;
        let k1d = rhs(t, f, df);
        let k2f = df + 0.5 * h * k1d;
        let k2d = rhs(t + 0.5 * h, f + 0.5 * h * k1f, k2f);
        let k3f = df + 0.5 * h * k2d;
        let k3d = rhs(t + 0.5 * h, f + 0.5 * h * k2f, k3f);
        let k4f = df + h * k3d;
        let k4d = rhs(t + h, f + h * k3f, k4f);
        f += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
        df += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        t += h;
    }
    df
}

/// μ₂ of the geodesic ball of radius `r` in the space form of curvature `k`.
pub fn shoot_mu2(k: f64, dim: usize, r: f64) -> Result<f64> {
    let space = SpaceForm::new(dim, k)?;
    space.check_radius(r)?;
    let scale = specfun::mu2_ball(dim)?.mu2 / (r * r);
    // march upward from near zero on the natural scale until f'(r) changes sign
    let f = |mu: f64| boundary_slope(&space, r, mu);
    let step = 0.02 * scale;
    let limit = 20.0 * scale + 10.0 * dim as f64;
    roots::march_and_refine(f, 1e-6 * scale, step, limit, 1e-14).map_err(|e| match e {
        Error::Bracketing(msg) => Error::Bracketing(format!("no eigenvalue for k={k}, N={dim}, r={r}: {msg}")),
        other => other,
    })
}
