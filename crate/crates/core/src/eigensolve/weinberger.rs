//! Weinberger test functions `f_i(x) = G(|x − p| / R) (x − p)_i / |x − p|`
//! and the resulting upper bound on μ₂.
//!
//! `G` is the capped ball eigenprofile and `R` the radius of the Euclidean
//! ball with the same volume as the domain. Positions are taken in the chart,
//! so `Exp_p^{-1}(q)` is read as `q − p`.

use serde::Serialize;

use crate::geometry::region::{check_inside, Region};
use crate::geometry::MetricField;
use crate::specfun::{unit_ball_volume, BallSpectrum};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct CenterOptions {
    pub damping: f64,
    pub max_iterations: usize,
    /// Target for `|F(p)| / |Ω|_g`.
    pub tol: f64,
}

impl Default for CenterOptions {
    fn default() -> Self {
        Self { damping: 0.5, max_iterations: 200, tol: 1e-8 }
    }
}

/// Residual of the centre-of-mass condition accepted by [`weinberger_bound`].
pub const ADMISSIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct CenterOfMass {
    pub point: Vec<f64>,
    /// `|∫ G(|x−p|/R) (x−p)/|x−p| dv_g| / |Ω|_g`.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeinbergerBound {
    pub bound: f64,
    /// `∫ Σ |∇f_i|²_g dv_g`.
    pub numerator: f64,
    /// `∫ Σ f_i² dv_g = ∫ G² dv_g`.
    pub denominator: f64,
    pub center: Vec<f64>,
    /// Radius `R` of the ball with the domain's volume.
    pub profile_radius: f64,
    pub center_residual: f64,
}

/// Volume `|Ω|_g`.
pub fn metric_volume(region: &dyn Region, metric: &MetricField) -> f64 {
    let p = region.interior_point();
    let mut v = 0.0;
    region.quadrature(&p, f64::INFINITY, &mut |x, w| v += w * metric.volume_density(x));
    v
}

fn check_dims(region: &dyn Region, metric: &MetricField, spec: &BallSpectrum) -> Result<()> {
    if region.dim() != metric.dim() || spec.dim != metric.dim() {
        return Err(Error::Domain(format!(
            "dimension mismatch: region {}, metric {}, spectrum {}",
            region.dim(),
            metric.dim(),
            spec.dim
        )));
    }
    Ok(())
}

fn profile_radius(region: &dyn Region, metric: &MetricField) -> f64 {
    let n = metric.dim();
    (metric_volume(region, metric) / unit_ball_volume(n)).powf(1.0 / n as f64)
}

/// `F(p)` and the slope `c` with `F(p + δ) ≈ F(p) − c δ`.
fn center_field(
    region: &dyn Region,
    metric: &MetricField,
    spec: &BallSpectrum,
    radius: f64,
    p: &[f64],
) -> (Vec<f64>, f64) {
    let n = p.len();
    let mut f = vec![0.0; n];
    let mut c = 0.0;
    region.quadrature(p, radius, &mut |x, w| {
        let d: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        let rho = d.iter().map(|a| a * a).sum::<f64>().sqrt();
        if rho == 0.0 {
            return;
        }
        let (g, dg) = spec.capped_profile(rho / radius);
        let wd = w * metric.volume_density(x);
        for i in 0..n {
            f[i] += wd * g * d[i] / rho;
        }
        c += wd * (dg / radius + (n as f64 - 1.0) * g / rho) / n as f64;
    });
    (f, c)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Finds `p` with `∫_Ω G(|x−p|/R) (x−p)/|x−p| dv_g = 0` by damped
/// fixed-point steps, halving a step whenever it fails to reduce the residual.
pub fn center_of_mass(
    region: &dyn Region,
    metric: &MetricField,
    spec: &BallSpectrum,
    opts: &CenterOptions,
) -> Result<CenterOfMass> {
    check_dims(region, metric, spec)?;
    let volume = metric_volume(region, metric);
    let radius = (volume / unit_ball_volume(metric.dim())).powf(1.0 / metric.dim() as f64);
    let mut p = region.centroid();
    check_inside(region, &p)?;
    let (mut f, mut c) = center_field(region, metric, spec, radius, &p);
    let mut res = norm(&f) / volume;
    for iter in 0..opts.max_iterations {
        if res <= opts.tol {
            return Ok(CenterOfMass { point: p, residual: res, iterations: iter });
        }
        let mut step = opts.damping;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = p.iter().zip(&f).map(|(a, b)| a + step * b / c).collect();
            if region.contains(&trial) {
                let (tf, tc) = center_field(region, metric, spec, radius, &trial);
                let tres = norm(&tf) / volume;
                if tres < res {
                    p = trial;
                    f = tf;
                    c = tc;
                    res = tres;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res <= opts.tol {
        return Ok(CenterOfMass { point: p, residual: res, iterations: opts.max_iterations });
    }
    Err(Error::CenterNotCertified { iterations: opts.max_iterations, residual: res })
}

/// The Rayleigh quotient of the test functions centred at `p`, using the
/// closed-form sums `Σ f_i² = G²` and
/// `Σ |∇f_i|²_g = (G')² g^{ab} x̂_a x̂_b + (G/ρ)² (tr g⁻¹ − g^{ab} x̂_a x̂_b)`.
pub fn weinberger_bound(
    region: &dyn Region,
    metric: &MetricField,
    p: &[f64],
    spec: &BallSpectrum,
) -> Result<WeinbergerBound> {
    check_dims(region, metric, spec)?;
    check_inside(region, p)?;
    let n = metric.dim();
    let volume = metric_volume(region, metric);
    let radius = profile_radius(region, metric);
    let (f, _) = center_field(region, metric, spec, radius, p);
    let center_residual = norm(&f) / volume;
    if center_residual > ADMISSIBILITY_TOL {
        return Err(Error::Admissibility(center_residual));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    region.quadrature(p, radius, &mut |x, w| {
        let d: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
        let rho = norm(&d);
        let g_mat = metric.eval(x);
        let det = g_mat.determinant();
        let ginv = g_mat.try_inverse().unwrap_or_else(nalgebra::Matrix3::identity);
        let wd = w * det.max(0.0).sqrt();
        let (g, dg) = spec.capped_profile(rho / radius);
        let dg = dg / radius;
        let (radial, g_over_rho) = if rho > 0.0 {
            let mut q = 0.0;
            for a in 0..n {
                for b in 0..n {
                    q += ginv[(a, b)] * d[a] * d[b];
                }
            }
            (q / (rho * rho), g / rho)
        } else {
            (ginv[(0, 0)], dg)
        };
        let trace: f64 = (0..n).map(|a| ginv[(a, a)]).sum();
        num += wd * (dg * dg * radial + g_over_rho * g_over_rho * (trace - radial));
        den += wd * g * g;
    });
    Ok(WeinbergerBound {
        bound: num / den,
        numerator: num,
        denominator: den,
        center: p.to_vec(),
        profile_radius: radius,
        center_residual,
    })
}
