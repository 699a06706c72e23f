//! Richardson extrapolation in the mesh size.

use crate::{roots, Error, Result};

/// Order of the leading discretisation error of P1 eigenvalues on meshes
/// whose boundary vertices lie on the sphere.
pub const FEM_ORDER: f64 = 2.0;

fn check_levels(h: &[f64], v: &[f64], needed: usize) -> Result<()> {
    if h.len() != v.len() {
        return Err(Error::Domain(format!("{} mesh sizes but {} values", h.len(), v.len())));
    }
    if h.len() < needed {
        return Err(Error::Domain(format!("need at least {needed} mesh levels, got {}", h.len())));
    }
    if h.iter().any(|x| !(x.is_finite() && *x > 0.0)) || h.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain(format!("mesh sizes must be positive and strictly decreasing: {h:?}")));
    }
    Ok(())
}

/// Eliminates the `h^order` term using the two finest levels.
pub fn richardson(h: &[f64], v: &[f64], order: f64) -> Result<f64> {
    check_levels(h, v, 2)?;
    let n = h.len();
    let (hc, hf) = (h[n - 2], h[n - 1]);
    let (vc, vf) = (v[n - 2], v[n - 1]);
    let q = (hc / hf).powf(order);
    Ok(vf + (vf - vc) / (q - 1.0))
}

/// Convergence order `p` implied by the three finest levels, assuming
/// `v(h) = v₀ + C h^p`.
pub fn observed_order(h: &[f64], v: &[f64]) -> Result<f64> {
    check_levels(h, v, 3)?;
    let n = h.len();
    let (h1, h2, h3) = (h[n - 3], h[n - 2], h[n - 1]);
    let (d12, d23) = (v[n - 3] - v[n - 2], v[n - 2] - v[n - 1]);
    if d23 == 0.0 || d12 / d23 <= 1.0 {
        return Err(Error::Domain(format!(
            "values {:?} do not converge monotonically",
            &v[n - 3..]
        )));
    }
    let target = d12 / d23;
    let ratio = |p: f64| (h1.powf(p) - h2.powf(p)) / (h2.powf(p) - h3.powf(p)) - target;
    roots::bisect_secant(ratio, 1e-3, 20.0, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_pure_power() {
        let h = [0.3, 0.2, 0.1];
        let v: Vec<f64> = h.iter().map(|x| 5.0 + 2.0 * x * x).collect();
        assert!((richardson(&h, &v, 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert!((observed_order(&h, &v).unwrap() - 2.0).abs() < 1e-9);
        let v3: Vec<f64> = h.iter().map(|x| 1.0 - x.powi(3)).collect();
        assert!((observed_order(&h, &v3).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_levels() {
        assert!(richardson(&[0.1], &[1.0], 2.0).is_err());
        assert!(richardson(&[0.1, 0.2], &[1.0, 2.0], 2.0).is_err());
        assert!(observed_order(&[0.4, 0.2, 0.1], &[1.0, 2.0, 1.0]).is_err());
    }
}
