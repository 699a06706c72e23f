//! Dimension constants built from the ball spectrum.

use serde::{Deserialize, Serialize};

use super::ball::{check_dim, mu2_ball, unit_sphere_area, BallSpectrum};
use crate::{quad, Result};

/// Constants of the local profile expansion in dimension `dim`.
///
/// * `gamma`: coefficient of `S · (v/|B|)^{2/N}` in the profile ratio.
/// * `alpha_minus`, `alpha_plus`: weights of `S` and `R_min` in the
///   geodesic-ball expansion of μ₂.
/// * `nu`: normalisation of the eccentricity coefficients of the optimal
///   ellipsoids.
/// * `combined`: `alpha_minus + 2 alpha_plus / N`, the ellipsoid coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub dim: usize,
    pub gamma: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub nu: f64,
    pub combined: f64,
}

impl DerivedConstants {
    pub fn from_spectrum(spec: &BallSpectrum) -> Self {
        let n = spec.dim as f64;
        let mu = spec.mu2;
        let p = spec.ball_volume * spec.phi1_sq;
        let gamma = (2.0 * mu + (n + 2.0) * (n - 2.0) - (n + 2.0) * p) / (6.0 * n * (n + 2.0) * mu);
        let alpha_minus = (p / (n + 2.0) - 1.0) / 6.0;
        let alpha_plus = (p / (n + 2.0) + 1.0) / 6.0;
        let nu = (2.0 * mu + n * p) / (n + 2.0);
        Self {
            dim: spec.dim,
            gamma,
            alpha_minus,
            alpha_plus,
            nu,
            combined: alpha_minus + 2.0 * alpha_plus / n,
        }
    }

    /// The second (reduced) form of γ_N, written purely in terms of μ₂.
    pub fn gamma_reduced_form(spec: &BallSpectrum) -> f64 {
        let n = spec.dim as f64;
        let mu = spec.mu2;
        1.0 / (3.0 * n * (n + 2.0)) + (n - 2.0) / (6.0 * n * mu) - 1.0 / (3.0 * n * (mu - n + 1.0))
    }

    /// `(|B| φ²(1) − (N − 2)) / (6N)`, which must equal `combined`.
    pub fn combined_closed_form(spec: &BallSpectrum) -> f64 {
        let n = spec.dim as f64;
        (spec.ball_volume * spec.phi1_sq - (n - 2.0)) / (6.0 * n)
    }
}

pub fn derived_constants(dim: usize) -> Result<DerivedConstants> {
    check_dim(dim)?;
    Ok(DerivedConstants::from_spectrum(&mu2_ball(dim)?))
}

/// Relative residual of `|B| φ²(1) (μ₂ − N + 1) = 2 μ₂`.
pub fn boundary_identity_residual(spec: &BallSpectrum) -> f64 {
    let n = spec.dim as f64;
    let lhs = spec.ball_volume * spec.phi1_sq * (spec.mu2 - n + 1.0);
    let rhs = 2.0 * spec.mu2;
    ((lhs - rhs) / rhs).abs()
}

/// `φ²(1)` recomputed from a quadrature of the unnormalised profile, without
/// the closed-form Lommel integral.
pub fn phi1_sq_by_quadrature(spec: &BallSpectrum) -> f64 {
    let n = spec.dim as f64;
    let integrand = |t: f64| {
        let g = spec.raw_profile(t);
        g * g * t.powf(n - 1.0)
    };
    let rough = quad::GaussLegendre::new(40).integrate(integrand, 0.0, 1.0);
    let l2 = quad::adaptive(integrand, 0.0, 1.0, 1e-15 * rough.abs());
    let g1 = spec.raw_profile(1.0);
    g1 * g1 / (spec.ball_volume * l2)
}

/// Upper bound on μ₂(B): `N + 2` for `N ≤ 4`, `N(N−1)/(N−2)` beyond.
pub fn mu2_upper_bound(dim: usize) -> f64 {
    let n = dim as f64;
    if dim <= 4 {
        n + 2.0
    } else {
        n * (n - 1.0) / (n - 2.0)
    }
}

/// `μ₂² − (N−1) μ₂ − 2(N+2)`, non-negative for the true eigenvalue.
pub fn rayleigh_certificate(spec: &BallSpectrum) -> f64 {
    let n = spec.dim as f64;
    spec.mu2 * spec.mu2 - (n - 1.0) * spec.mu2 - 2.0 * (n + 2.0)
}

/// `∫_B ((G')² + (N−1) G²/|x|²) dx` by radial quadrature; equals `N μ₂(B)`.
pub fn ball_gradient_energy(spec: &BallSpectrum) -> f64 {
    let n = spec.dim as f64;
    unit_sphere_area(spec.dim)
        * quad::adaptive(|t| spec.gradient_energy_density(t) * t.powf(n - 1.0), 0.0, 1.0, 1e-15)
}

/// `∫_B G(|x|)² dx`; equals `N`.
pub fn ball_profile_mass(spec: &BallSpectrum) -> f64 {
    let n = spec.dim as f64;
    unit_sphere_area(spec.dim)
        * quad::adaptive(
            |t| {
                let (g, _) = spec.capped_profile(t);
                g * g * t.powf(n - 1.0)
            },
            0.0,
            1.0,
            1e-15,
        )
}

/// One row of the exported constants table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRow {
    #[serde(rename = "N")]
    pub dim: usize,
    pub mu2: f64,
    pub ball_volume: f64,
    pub phi1_sq: f64,
    pub gamma: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub nu: f64,
}

impl ConstantsRow {
    pub fn new(dim: usize) -> Result<Self> {
        let spec = mu2_ball(dim)?;
        let c = DerivedConstants::from_spectrum(&spec);
        Ok(Self {
            dim,
            mu2: spec.mu2,
            ball_volume: spec.ball_volume,
            phi1_sq: spec.phi1_sq,
            gamma: c.gamma,
            alpha_minus: c.alpha_minus,
            alpha_plus: c.alpha_plus,
            nu: c.nu,
        })
    }
}

/// Status of the closed-form checks for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityChecks {
    pub boundary_identity_residual: f64,
    pub lower_bound_ok: bool,
    pub upper_bound_ok: bool,
    pub gamma_negative: bool,
    pub gamma_forms_agree: bool,
}

impl IdentityChecks {
    pub fn evaluate(dim: usize) -> Result<Self> {
        let spec = mu2_ball(dim)?;
        let c = DerivedConstants::from_spectrum(&spec);
        Ok(Self {
            boundary_identity_residual: boundary_identity_residual(&spec),
            lower_bound_ok: spec.mu2 >= dim as f64 + 1.0,
            upper_bound_ok: spec.mu2 < mu2_upper_bound(dim),
            gamma_negative: c.gamma < 0.0,
            gamma_forms_agree: (c.gamma - DerivedConstants::gamma_reduced_form(&spec)).abs() <= 1e-12,
        })
    }

    pub fn all_pass(&self) -> bool {
        self.boundary_identity_residual <= 1e-10
            && self.lower_bound_ok
            && self.upper_bound_ok
            && self.gamma_negative
            && self.gamma_forms_agree
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_dim2_matches_reduced_oracle() {
        let spec = mu2_ball(2).unwrap();
        let c = DerivedConstants::from_spectrum(&spec);
        // 1/24 − 1/(6(μ₂ − 1)) evaluated independently
        let oracle = 1.0 / 24.0 - 1.0 / (6.0 * (spec.mu2 - 1.0));
        assert!((c.gamma - oracle).abs() < 1e-13);
        assert!((c.gamma - (-0.0281)).abs() < 5e-5);
    }

    #[test]
    fn alpha_difference_is_one_third() {
        for dim in 2..=50 {
            let c = derived_constants(dim).unwrap();
            assert!((c.alpha_plus - c.alpha_minus - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_decays_in_magnitude() {
        let g10 = derived_constants(10).unwrap().gamma.abs();
        let g20 = derived_constants(20).unwrap().gamma.abs();
        let g30 = derived_constants(30).unwrap().gamma.abs();
        assert!(g10 > g20 && g20 > g30);
    }

    #[test]
    fn all_dimension_invariants() {
        for dim in 2..=50 {
            let spec = mu2_ball(dim).unwrap();
            let c = DerivedConstants::from_spectrum(&spec);
            let n = dim as f64;
            assert!(boundary_identity_residual(&spec) <= 1e-10, "dim {dim}");
            let q = phi1_sq_by_quadrature(&spec);
            let lhs = spec.ball_volume * q * (spec.mu2 - n + 1.0);
            assert!((lhs / (2.0 * spec.mu2) - 1.0).abs() <= 1e-10, "dim {dim}: quadrature route {}", lhs / (2.0 * spec.mu2) - 1.0);
            assert!(spec.mu2 >= n + 1.0, "dim {dim}");
            assert!(spec.mu2 < mu2_upper_bound(dim), "dim {dim}");
            assert!(rayleigh_certificate(&spec) >= 0.0, "dim {dim}");
            assert!(c.gamma < 0.0, "dim {dim}");
            assert!((c.gamma - DerivedConstants::gamma_reduced_form(&spec)).abs() <= 1e-12);
            assert!((c.combined - DerivedConstants::combined_closed_form(&spec)).abs() <= 1e-12);
            assert!(c.nu > 0.0);
            assert!(IdentityChecks::evaluate(dim).unwrap().all_pass());
        }
    }

    #[test]
    fn ball_energy_identity_low_dims() {
        for dim in [2, 3, 4] {
            let spec = mu2_ball(dim).unwrap();
            let e = ball_gradient_energy(&spec);
            let want = dim as f64 * spec.mu2;
            assert!((e - want).abs() < 1e-6 * want, "dim {dim}: {e} vs {want}");
            let m = ball_profile_mass(&spec);
            assert!((m - dim as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn table_row_serialises_with_capital_n() {
        let row = ConstantsRow::new(3).unwrap();
        let v = serde_json::to_value(row).unwrap();
        assert_eq!(v["N"], 3);
        for key in ["mu2", "ball_volume", "phi1_sq", "gamma", "alpha_minus", "alpha_plus", "nu"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }
}
