//! Simply connected space forms of constant curvature `k`.

use std::f64::consts::PI;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceForm {
    pub dim: usize,
    pub k: f64,
}

impl SpaceForm {
    pub fn new(dim: usize, k: f64) -> Result<Self> {
        crate::specfun::ball::check_dim(dim)?;
        if !k.is_finite() {
            return Err(Error::Domain(format!("curvature {k} is not finite")));
        }
        Ok(Self { dim, k })
    }

    /// Radius beyond which geodesic balls stop being embedded (`π/√k` for
    /// `k > 0`, infinite otherwise).
    pub fn max_radius(&self) -> f64 {
        if self.k > 0.0 {
            PI / self.k.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Rejects radii that are non-positive or reach the conjugate radius.
    pub fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("geodesic radius {r} must be positive")));
        }
        if r >= self.max_radius() {
            return Err(Error::Domain(format!(
                "geodesic radius {r} reaches the conjugate radius {}",
                self.max_radius()
            )));
        }
        Ok(())
    }

    /// `sn_k(ρ)`: `sin(√k ρ)/√k`, `ρ`, or `sinh(√−k ρ)/√−k`.
    pub fn sn(&self, rho: f64) -> f64 {
        rho * sn_over_rho(self.k, rho)
    }

    /// `sn_k'(ρ)`.
    pub fn cs(&self, rho: f64) -> f64 {
        cs(self.k, rho)
    }

    /// Volume of the geodesic ball of radius `r`:
    /// `|S^{N−1}| ∫₀^r sn_k(ρ)^{N−1} dρ`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.volume_unchecked(r))
    }

    fn volume_unchecked(&self, r: f64) -> f64 {
        let n = self.dim as f64;
        let area = crate::specfun::unit_sphere_area(self.dim);
        let rule = crate::quad::GaussLegendre::new(40);
        area * rule.composite(|rho| self.sn(rho).powf(n - 1.0), &[0.0, r], 4)
    }

    /// Inverts [`Self::ball_volume`] for the radius.
    pub fn radius_for_volume(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("volume {v} must be positive")));
        }
        let euclid = (v / crate::specfun::unit_ball_volume(self.dim)).powf(1.0 / self.dim as f64);
        // positive curvature shrinks balls, negative curvature inflates them
        let (lo, hi) = if self.k > 0.0 {
            let top = self.max_radius();
            let total = self.volume_unchecked(top);
            if v >= total {
                return Err(Error::Domain(format!(
                    "volume {v} is not below the total volume {total}"
                )));
            }
            (euclid.min(top), top)
        } else if self.k < 0.0 {
            (0.0, euclid)
        } else {
            return Ok(euclid);
        };
        crate::roots::bisect_secant(|r| self.volume_unchecked(r) - v, lo, hi, 1e-15)
    }
}

/// `sn_k(ρ)/ρ`, with a series near `kρ² = 0`.
pub fn sn_over_rho(k: f64, rho: f64) -> f64 {
    let x = k * rho * rho;
    if x.abs() < 1e-3 {
        // 1 − x/6 + x²/120 − x³/5040 + x⁴/362880
        1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0 * (1.0 - x / 72.0)))
    } else if k > 0.0 {
        let s = k.sqrt();
        (s * rho).sin() / (s * rho)
    } else {
        let s = (-k).sqrt();
        (s * rho).sinh() / (s * rho)
    }
}

/// `sn_k'(ρ)`.
pub fn cs(k: f64, rho: f64) -> f64 {
    if k > 0.0 {
        (k.sqrt() * rho).cos()
    } else if k < 0.0 {
        ((-k).sqrt() * rho).cosh()
    } else {
        1.0
    }
}
