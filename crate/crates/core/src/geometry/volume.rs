//! Volumes of geodesic balls from the truncated normal-coordinate metric and
//! the fit of their small-radius expansion.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::curvature::CurvatureModel;
use super::metric::MetricField;
use super::region::{integrate, Ball};
use crate::{linalg, specfun, Error, Result};

/// `∫_B √det g dx` over the unit ball.
pub fn unit_ball_volume_under(metric: &MetricField) -> Result<f64> {
    let ball = Ball::unit(metric.dim())?;
    let origin = vec![0.0; metric.dim()];
    Ok(integrate(&ball, &origin, f64::INFINITY, |x| metric.volume_density(x)))
}

/// Volume of the geodesic ball of radius `r` computed from the truncated
/// metric: `r^N ∫_B √det g_r dx`.
pub fn geodesic_ball_volume(model: &CurvatureModel, r: f64) -> Result<f64> {
    let metric = MetricField::ball_expansion(model, r)?;
    Ok(r.powi(model.dim as i32) * unit_ball_volume_under(&metric)?)
}

/// Result of fitting `V(r) / (|B| r^N) = 1 + c r² + d r⁴ + e r⁶`.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeExpansion {
    pub coefficient: f64,
    /// `−S / (6 (N + 2))`.
    pub predicted: f64,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub condition: f64,
}

impl VolumeExpansion {
    pub fn relative_error(&self) -> f64 {
        if self.predicted == 0.0 {
            self.coefficient.abs()
        } else {
            ((self.coefficient - self.predicted) / self.predicted).abs()
        }
    }
}

/// Fits the `r²` coefficient of `ratio(r) = V(r) / (|B| r^N)` from samples.
pub fn fit_volume_coefficient(dim: usize, scalar: f64, radii: &[f64], ratios: &[f64]) -> Result<VolumeExpansion> {
    if radii.len() != ratios.len() || radii.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 volume samples, got {}", radii.len())));
    }
    let k = radii.len();
    let a = DMatrix::from_fn(k, 3, |i, j| radii[i].powi(2 * (j as i32 + 1)));
    let y = DVector::from_iterator(k, ratios.iter().map(|v| v - 1.0));
    let (c, condition) = linalg::least_squares(&a, &y)?;
    Ok(VolumeExpansion {
        coefficient: c[0],
        predicted: -scalar / (6.0 * (dim as f64 + 2.0)),
        radii: radii.to_vec(),
        ratios: ratios.to_vec(),
        condition,
    })
}

/// Samples the truncated-metric volume at `radii` and fits the expansion.
pub fn volume_expansion(model: &CurvatureModel, radii: &[f64]) -> Result<VolumeExpansion> {
    let unit = specfun::unit_ball_volume(model.dim);
    let ratios = radii
        .iter()
        .map(|&r| geodesic_ball_volume(model, r).map(|v| v / (unit * r.powi(model.dim as i32))))
        .collect::<Result<Vec<_>>>()?;
    fit_volume_coefficient(model.dim, model.scalar, radii, &ratios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SpaceForm;

    #[test]
    fn exact_sphere_caps_give_minus_one_twelfth() {
        // samples from the closed form 2π(1 − cos r), fitted like model output
        let radii: Vec<f64> = (1..=8).map(|i| 0.05 * i as f64).collect();
        let ratios: Vec<f64> = radii
            .iter()
            .map(|&r| 2.0 * std::f64::consts::PI * (1.0 - r.cos()) / (std::f64::consts::PI * r * r))
            .collect();
        let fit = fit_volume_coefficient(2, 2.0, &radii, &ratios).unwrap();
        assert!((fit.coefficient + 1.0 / 12.0).abs() < 1e-6, "{}", fit.coefficient);
        assert!((fit.predicted + 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn truncated_metric_volume_matches_leading_order() {
        for (dim, model) in [
            (2, CurvatureModel::space_form(2, 1.0)),
            (3, CurvatureModel::space_form(3, -1.0)),
            (3, CurvatureModel::product(&[(2, 1.0), (1, 0.0)])),
        ] {
            let radii: Vec<f64> = (1..=6).map(|i| 0.05 * i as f64).collect();
            let fit = volume_expansion(&model, &radii).unwrap();
            assert!(fit.relative_error() < 1e-6, "dim {dim}: {} vs {}", fit.coefficient, fit.predicted);
        }
    }

    #[test]
    fn truncated_and_exact_agree_for_small_radius() {
        let s = SpaceForm::new(3, 1.0).unwrap();
        let model = CurvatureModel::space_form(3, 1.0);
        let r = 0.05;
        let exact = s.ball_volume(r).unwrap();
        let approx = geodesic_ball_volume(&model, r).unwrap();
        // both agree through order r²; the difference is O(r⁴) relative
        assert!(((exact - approx) / exact).abs() < 1e-5);
    }
}
