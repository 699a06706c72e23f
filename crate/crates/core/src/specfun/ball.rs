//! The first nontrivial Neumann eigenvalue of the Euclidean unit ball and its
//! normalised radial eigenprofile.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::bessel::{self, HalfOrder};
use crate::roots;
use crate::{Error, Result, MAX_DIM, MIN_DIM};

/// Spectral data of the unit ball `B ⊂ ℝᴺ`.
///
/// The eigenfunctions of `mu2` are `φ(|x|) xᵢ/|x|`, where
/// `φ(t) = norm_factor · t^{1-N/2} J_{N/2}(√mu2 · t)` is normalised so that
/// `∫₀¹ φ² t^{N-1} dt = 1/|B|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpectrum {
    pub dim: usize,
    pub mu2: f64,
    pub ball_volume: f64,
    pub phi1_sq: f64,
    pub norm_factor: f64,
}

/// Volume of the Euclidean unit ball, `π^{N/2} / Γ(N/2 + 1)`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    (0.5 * dim as f64 * PI.ln() - bessel::ln_gamma_plus_one(HalfOrder::for_dim(dim).expect("dim checked"))).exp()
}

/// Surface area of the unit sphere `S^{N-1}`, `N |B|`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&dim) {
        return Err(Error::Domain(format!(
            "dimension {dim} outside the supported range {MIN_DIM}..={MAX_DIM}"
        )));
    }
    Ok(())
}

/// `d/dt [t^{1-N/2} J_{N/2}(t)]` up to the positive factor `t^{1-N/2}`,
/// written as `J_{N/2-1}(t) - ((N-1)/t) J_{N/2}(t)`.
pub fn profile_derivative_sign_function(dim: usize, t: f64) -> f64 {
    let order = HalfOrder::for_dim(dim).expect("dim checked");
    let lower = HalfOrder::from_twice(dim as u32 - 2).expect("dim >= 2");
    bessel::j(lower, t) - (dim as f64 - 1.0) / t * bessel::j(order, t)
}

/// Computes [`BallSpectrum`] for `2 <= dim <= 50`.
pub fn mu2_ball(dim: usize) -> Result<BallSpectrum> {
    check_dim(dim)?;
    let n = dim as f64;
    let start = (n - 1.0).sqrt();
    let limit = (n * (n + 2.0)).sqrt();
    let root = roots::march_and_refine(
        |t| profile_derivative_sign_function(dim, t),
        start,
        0.1,
        limit,
        1e-15,
    )
    .map_err(|e| Error::Internal(format!("first zero of the profile derivative not bracketed: {e}")))?;
    let mu2 = root * root;

    let ball_volume = unit_ball_volume(dim);
    let order = HalfOrder::for_dim(dim)?;
    let j_at_root = bessel::j(order, root);
    // ∫₀¹ t^{N-1} g² dt = (μ₂ - N + 1)/(2 μ₂) · J²_{N/2}(√μ₂)
    let profile_l2 = (mu2 - n + 1.0) / (2.0 * mu2) * j_at_root * j_at_root;
    let norm_factor = 1.0 / (ball_volume * profile_l2).sqrt();
    // g(1) = J_{N/2}(√μ₂)
    let phi1 = norm_factor * j_at_root;
    Ok(BallSpectrum {
        dim,
        mu2,
        ball_volume,
        phi1_sq: phi1 * phi1,
        norm_factor,
    })
}

impl BallSpectrum {
    pub fn new(dim: usize) -> Result<Self> {
        mu2_ball(dim)
    }

    fn order(&self) -> HalfOrder {
        HalfOrder::for_dim(self.dim).expect("validated at construction")
    }

    pub fn sqrt_mu2(&self) -> f64 {
        self.mu2.sqrt()
    }

    /// Unnormalised profile `g(t) = t^{1-N/2} J_{N/2}(√μ₂ t)`.
    pub fn raw_profile(&self, t: f64) -> f64 {
        let a = self.sqrt_mu2();
        let nu = self.order().value();
        t * a.powf(nu) * bessel::reduced(self.order(), a * t)
    }

    /// `(g, g', g'')` from the reduced Bessel series; regular at `t = 0`.
    pub fn raw_profile_jet(&self, t: f64) -> (f64, f64, f64) {
        let a = self.sqrt_mu2();
        let o = self.order();
        let scale = a.powf(o.value());
        let r0 = bessel::reduced(o, a * t);
        let r1 = bessel::reduced(o.raise(), a * t);
        let r2 = bessel::reduced(o.raise().raise(), a * t);
        let a2 = a * a;
        let g = scale * t * r0;
        let dg = scale * (r0 - a2 * t * t * r1);
        let d2g = scale * (-3.0 * a2 * t * r1 + a2 * a2 * t * t * t * r2);
        (g, dg, d2g)
    }

    /// φ(t) for `t ∈ [0, 1]`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!(
                "phi is defined on [0, 1]; got t = {t} (use the capped profile beyond 1)"
            )));
        }
        Ok(self.norm_factor * self.raw_profile(t))
    }

    /// `(φ, φ', φ'')` at `t ∈ [0, 1]`.
    pub fn phi_jet(&self, t: f64) -> Result<(f64, f64, f64)> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("phi is defined on [0, 1]; got t = {t}")));
        }
        let (g, dg, d2g) = self.raw_profile_jet(t);
        let c = self.norm_factor;
        Ok((c * g, c * dg, c * d2g))
    }

    pub fn phi1(&self) -> f64 {
        self.phi1_sq.sqrt()
    }

    /// The capped profile `G(t) = φ(t)` for `t ≤ 1`, `φ(1)` beyond, with its
    /// derivative (zero on the constant branch).
    pub fn capped_profile(&self, t: f64) -> (f64, f64) {
        let t = t.max(0.0);
        if t > 1.0 {
            return (self.phi1(), 0.0);
        }
        let (g, dg, _) = self.raw_profile_jet(t);
        (self.norm_factor * g, self.norm_factor * dg)
    }

    /// `(G')² + (N-1) G² / t²`, the pointwise value of `Σ |∇fᵢ|²` for the
    /// Weinberger test functions in the Euclidean metric.
    pub fn gradient_energy_density(&self, t: f64) -> f64 {
        let (g, dg) = self.capped_profile(t);
        let n1 = self.dim as f64 - 1.0;
        if t <= 0.0 {
            // G ~ φ'(0) t
            return dg * dg * (1.0 + n1);
        }
        dg * dg + n1 * g * g / (t * t)
    }
}
