//! Extraction of the O(1) term from `μ₂(r) = μ₂(B)/r² + c₀ + c₁ r + c₂ r²`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{linalg, Error, Result};

pub const MIN_SAMPLES: usize = 5;
/// Smallest accepted `max r / min r`.
pub const MIN_SPAN: f64 = 4.0;
/// Largest accepted condition number of the `{1, r, r²}` design.
pub const MAX_CONDITION: f64 = 1e8;
/// Accepted fits have `fit_residual ≤ RESIDUAL_FRACTION · |constant|`.
pub const RESIDUAL_FRACTION: f64 = 1e-3;

pub const FIT_MODEL: &str = "mu2_ball/r^2 + c0 + c1*r + c2*r^2";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    /// `(r, μ₂)` pairs, `r` decreasing.
    pub samples: Vec<(f64, f64)>,
    /// Coefficient of `1/r²`, held at μ₂(B).
    pub leading: f64,
    pub constant: f64,
    /// Coefficient of `r`.
    pub slope: f64,
    /// Coefficient of `r²`.
    pub quadratic: f64,
    /// Root-mean-square residual of the fit.
    pub fit_residual: f64,
    pub condition: f64,
    /// Whether the residual is small against the constant.
    pub accepted: bool,
    pub model: String,
}

pub fn fit_constant_term(samples: &[(f64, f64)], mu2_ball: f64) -> Result<ExpansionFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Fit(format!("need at least {MIN_SAMPLES} samples, got {}", samples.len())));
    }
    if samples.iter().any(|&(r, m)| !(r > 0.0 && r.is_finite() && m > 0.0 && m.is_finite())) {
        return Err(Error::Fit("samples need positive radii and positive eigenvalues".into()));
    }
    if samples.windows(2).any(|w| w[1].0 >= w[0].0) {
        return Err(Error::Fit("sample radii must be strictly decreasing".into()));
    }
    let span = samples[0].0 / samples[samples.len() - 1].0;
    if span < MIN_SPAN {
        return Err(Error::Fit(format!("radii span a factor {span:.3}, need at least {MIN_SPAN}")));
    }
    let n = samples.len();
    let a = DMatrix::from_fn(n, 3, |i, j| samples[i].0.powi(j as i32));
    let y = DVector::from_iterator(n, samples.iter().map(|&(r, m)| m - mu2_ball / (r * r)));
    let (c, condition) = linalg::least_squares(&a, &y)?;
    if condition > MAX_CONDITION {
        return Err(Error::Fit(format!("design matrix condition number {condition:.3e} too large")));
    }
    let resid = &a * &c - &y;
    let fit_residual = (resid.norm_squared() / n as f64).sqrt();
    Ok(ExpansionFit {
        samples: samples.to_vec(),
        leading: mu2_ball,
        constant: c[0],
        slope: c[1],
        quadratic: c[2],
        fit_residual,
        condition,
        accepted: fit_residual <= RESIDUAL_FRACTION * c[0].abs(),
        model: FIT_MODEL.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const RADII: [f64; 6] = [0.4, 0.3, 0.2, 0.15, 0.1, 0.08];

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        let mu = crate::specfun::mu2_ball(2).unwrap().mu2;
        RADII.iter().map(|&r| (r, mu / (r * r) + f(r))).collect()
    }

    #[test]
    fn recovers_pure_constant() {
        let mu = crate::specfun::mu2_ball(2).unwrap().mu2;
        let fit = fit_constant_term(&synthetic(|_| 7.0), mu).unwrap();
        assert!((fit.constant - 7.0).abs() < 1e-10, "{}", fit.constant);
        assert!(fit.accepted);
    }

    #[test]
    fn recovers_constant_with_quadratic_nuisance() {
        let mu = crate::specfun::mu2_ball(2).unwrap().mu2;
        let fit = fit_constant_term(&synthetic(|r| 7.0 + 3.0 * r * r), mu).unwrap();
        assert!((fit.constant - 7.0).abs() < 1e-8);
        assert!((fit.quadratic - 3.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_sample_sets() {
        let mu = 1.0;
        let few: Vec<_> = synthetic(|_| 1.0).into_iter().take(4).collect();
        assert!(fit_constant_term(&few, mu).is_err());
        let mut rev = synthetic(|_| 1.0);
        rev.reverse();
        assert!(fit_constant_term(&rev, mu).is_err());
        let narrow: Vec<_> = [0.40, 0.39, 0.38, 0.37, 0.36].iter().map(|&r| (r, 1.0 / (r * r))).collect();
        assert!(matches!(fit_constant_term(&narrow, mu), Err(Error::Fit(_))));
        let clustered: Vec<_> =
            [0.4, 0.1 + 3e-9, 0.1 + 2e-9, 0.1 + 1e-9, 0.1].iter().map(|&r| (r, 1.0 / (r * r))).collect();
        assert!(matches!(fit_constant_term(&clustered, mu), Err(Error::Fit(_))));
    }
}
