//! Small-radius expansions of μ₂ on geodesic balls and ellipsoids, measured
//! with finite elements on the rescaled unit ball.
//!
//! For every mesh level the Euclidean eigenvalue on the same mesh is
//! subtracted, so the extrapolated quantity is the curvature-induced shift
//! `D(r) = μ₂(g_r) − μ₂(δ)`. The per-radius sample is `(μ₂(B) + D(r)) / r²`.

use rayon::prelude::*;

use super::fit::{fit_constant_term, FIT_MODEL};
use super::report::{version, Provenance, SampleRow, VerificationReport};
use super::richardson::{observed_order, richardson, FEM_ORDER};
use crate::eigensolve::{neumann_mu2_with, EigOptions, Mesh};
use crate::geometry::{CurvatureModel, EllipsoidSpec, MetricField};
use crate::specfun::{derived_constants, mu2_ball};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ExpansionOptions {
    /// Mesh sizes, strictly decreasing.
    pub mesh_sizes: Vec<f64>,
    /// Geodesic radii, strictly decreasing.
    pub radii: Vec<f64>,
    /// Relative tolerance on the fitted constant.
    pub tolerance: f64,
    /// Absolute tolerance used when the theoretical constant is zero.
    pub abs_tolerance: f64,
    pub eig: EigOptions,
    /// Label written to the sample rows.
    pub tag: String,
}

impl ExpansionOptions {
    /// Default sweep for `dim ∈ {2, 3}`.
    pub fn for_dim(dim: usize) -> Self {
        let mesh_sizes = if dim == 2 { vec![0.1, 0.05, 0.025] } else { vec![1.0 / 6.0, 1.0 / 8.0, 1.0 / 12.0] };
        Self {
            mesh_sizes,
            radii: vec![0.4, 0.3, 0.2, 0.15, 0.1],
            tolerance: 0.05,
            abs_tolerance: 1e-2,
            eig: EigOptions::default(),
            tag: "custom".to_string(),
        }
    }
}

/// `α⁻ S + 2 α⁺ R_min`.
pub fn ball_constant(model: &CurvatureModel) -> Result<f64> {
    let c = derived_constants(model.dim)?;
    Ok(c.alpha_minus * model.scalar + 2.0 * c.alpha_plus * model.ricci_min)
}

/// `(α⁻ + 2 α⁺ / N) S`.
pub fn ellipsoid_constant(model: &CurvatureModel) -> Result<f64> {
    Ok(derived_constants(model.dim)?.combined * model.scalar)
}

pub fn verify_ball_expansion(model: &CurvatureModel, opts: &ExpansionOptions) -> Result<VerificationReport> {
    let theory = ball_constant(model)?;
    run("ball-expansion", model, theory, opts, |r| MetricField::ball_expansion(model, r))
}

/// Uses the optimal eccentricity coefficients.
pub fn verify_ellipsoid_expansion(model: &CurvatureModel, opts: &ExpansionOptions) -> Result<VerificationReport> {
    let theory = ellipsoid_constant(model)?;
    run("ellipsoid-expansion", model, theory, opts, |r| {
        MetricField::ellipsoid_pullback(&EllipsoidSpec::optimal(model, r)?)
    })
}

/// Ellipsoids with prescribed trace-free coefficients `b`. Unless `b` is the
/// optimal choice the result is reported without being asserted.
pub fn verify_ellipsoid_with_coefficients(
    model: &CurvatureModel,
    b: &[f64],
    opts: &ExpansionOptions,
) -> Result<VerificationReport> {
    EllipsoidSpec::with_coefficients(model, 1.0, b.to_vec())?;
    let optimal = crate::geometry::b_coefficients(model, &derived_constants(model.dim)?);
    let is_optimal = optimal.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-14);
    let theory = ellipsoid_constant(model)?;
    let mut report = run("ellipsoid-expansion", model, theory, opts, |r| {
        MetricField::ellipsoid_pullback(&EllipsoidSpec::with_coefficients(model, r, b.to_vec())?)
    })?;
    report.asserted = is_optimal;
    Ok(report)
}

fn run(
    check: &str,
    model: &CurvatureModel,
    theory: f64,
    opts: &ExpansionOptions,
    metric_at: impl Fn(f64) -> Result<MetricField> + Sync,
) -> Result<VerificationReport> {
    let dim = model.dim;
    if !(2..=3).contains(&dim) {
        return Err(Error::Domain(format!("finite-element expansions need dimension 2 or 3, got {dim}")));
    }
    if opts.mesh_sizes.len() < 2 {
        return Err(Error::Domain("need at least two mesh sizes".into()));
    }
    let mu_ball = mu2_ball(dim)?.mu2;
    let euclid = MetricField::euclidean(dim)?;
    let radii = &opts.radii;

    let mut hs = Vec::new();
    let mut dofs = Vec::new();
    // shifts[level][radius]
    let mut shifts: Vec<Vec<f64>> = Vec::new();
    let mut raw: Vec<Vec<f64>> = Vec::new();
    for &h in &opts.mesh_sizes {
        let mesh = Mesh::unit_ball(dim, h)?;
        let base = neumann_mu2_with(&mesh, &euclid, &opts.eig)?.mu2;
        let values: Vec<f64> = radii
            .par_iter()
            .map(|&r| Ok(neumann_mu2_with(&mesh, &metric_at(r)?, &opts.eig)?.mu2))
            .collect::<Result<_>>()?;
        hs.push(mesh.h());
        dofs.push(mesh.n_vertices());
        shifts.push(values.iter().map(|v| v - base).collect());
        raw.push(values);
    }

    let mut samples = Vec::with_capacity(radii.len());
    let mut orders = Vec::with_capacity(radii.len());
    for (j, &r) in radii.iter().enumerate() {
        let d: Vec<f64> = shifts.iter().map(|level| level[j]).collect();
        let shift = richardson(&hs, &d, FEM_ORDER)?;
        orders.push(if hs.len() >= 3 { observed_order(&hs, &d).ok() } else { None });
        samples.push((r, (mu_ball + shift) / (r * r)));
    }
    let fit = fit_constant_term(&samples, mu_ball)?;

    let mut rows = Vec::new();
    for (j, &(r, extrapolated)) in samples.iter().enumerate() {
        for (level, &h) in hs.iter().enumerate() {
            rows.push(SampleRow {
                r,
                h: Some(h),
                mu2_raw: raw[level][j] / (r * r),
                mu2_extrapolated: extrapolated,
                model: opts.tag.clone(),
            });
        }
    }
    let provenance = Provenance {
        solver: "fem-p1".to_string(),
        mesh_sizes: hs,
        dofs,
        grid: radii.clone(),
        extrapolation_order: Some(FEM_ORDER),
        observed_orders: orders,
        fit_model: FIT_MODEL.to_string(),
        version: version(),
    };
    let mut report =
        VerificationReport::compare(check, theory, fit.constant, opts.tolerance, opts.abs_tolerance, provenance);
    report.fit = Some(fit);
    report.samples = rows;
    Ok(report)
}
