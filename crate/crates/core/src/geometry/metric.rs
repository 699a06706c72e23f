//! Riemannian metrics on the closed unit ball in dimensions 2 and 3.
//!
//! Values are returned as 3×3 matrices; in dimension 2 the third row and
//! column are those of the identity so determinants and inverses of the
//! leading block come out unchanged.

use nalgebra::{Matrix3, SymmetricEigen};

use super::curvature::CurvatureModel;
use super::spaceform::sn_over_rho;
use crate::specfun::DerivedConstants;
use crate::{Error, Result};

/// Number of interior sample points used by the positivity check.
pub const POSITIVITY_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    Euclidean,
    /// `g_ij(x) = δ_ij + (r²/3) R_kilj x^k x^l`: the geodesic ball of radius
    /// `r` in normal coordinates, rescaled to the unit ball.
    BallExpansion { r: f64 },
    /// `D g_r(D x) D` with `D = diag(1 + r² b_i)`.
    EllipsoidPullback { r: f64, b: Vec<f64> },
    /// The space-form metric of curvature `k` pulled back to the unit ball by
    /// `x ↦ exp(r x)` and divided by `r²`.
    SpaceformExact { k: f64, r: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    dim: usize,
    kind: MetricKind,
    /// `c[((i*n + j)*n + k)*n + l] = R_kilj / 3`, present for curvature-based kinds.
    quadratic: Vec<f64>,
    model: Option<CurvatureModel>,
    scale: f64,
}

fn check_metric_dim(dim: usize) -> Result<()> {
    if !(2..=3).contains(&dim) {
        return Err(Error::Domain(format!(
            "metric fields are supported in dimensions 2 and 3, got {dim}"
        )));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius {r} must be non-negative and finite")));
    }
    Ok(())
}

impl MetricField {
    pub fn euclidean(dim: usize) -> Result<Self> {
        check_metric_dim(dim)?;
        Ok(Self { dim, kind: MetricKind::Euclidean, quadratic: Vec::new(), model: None, scale: 1.0 })
    }

    /// Second-order normal-coordinate expansion of the geodesic ball of
    /// radius `r`, rescaled to the unit ball. Fails with
    /// [`Error::RadiusTooLarge`] when the truncated metric is not positive
    /// definite on the ball.
    pub fn ball_expansion(model: &CurvatureModel, r: f64) -> Result<Self> {
        check_metric_dim(model.dim)?;
        check_r(r)?;
        let field = Self {
            dim: model.dim,
            kind: MetricKind::BallExpansion { r },
            quadratic: quadratic_coefficients(model),
            model: Some(model.clone()),
            scale: 1.0,
        };
        field.check_positive()?;
        Ok(field)
    }

    /// The ball expansion pulled back by the linear map `D = diag(1 + r² b_i)`.
    pub fn ellipsoid_pullback(spec: &EllipsoidSpec) -> Result<Self> {
        check_metric_dim(spec.model.dim)?;
        check_r(spec.r)?;
        spec.validate()?;
        let field = Self {
            dim: spec.model.dim,
            kind: MetricKind::EllipsoidPullback { r: spec.r, b: spec.b.clone() },
            quadratic: quadratic_coefficients(&spec.model),
            model: Some(spec.model.clone()),
            scale: 1.0,
        };
        field.check_positive()?;
        Ok(field)
    }

    /// Exact space-form metric on the rescaled geodesic ball.
    pub fn spaceform_exact(dim: usize, k: f64, r: f64) -> Result<Self> {
        check_metric_dim(dim)?;
        check_r(r)?;
        if k > 0.0 && r * k.sqrt() >= std::f64::consts::PI {
            return Err(Error::Domain(format!(
                "radius {r} reaches the conjugate radius of curvature {k}"
            )));
        }
        Ok(Self {
            dim,
            kind: MetricKind::SpaceformExact { k, r },
            quadratic: Vec::new(),
            model: Some(CurvatureModel::space_form(dim, k)),
            scale: 1.0,
        })
    }

    /// The metric multiplied by the constant `c > 0`.
    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!("metric scale {c} must be positive")));
        }
        self.scale *= c;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn model(&self) -> Option<&CurvatureModel> {
        self.model.as_ref()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_euclidean(&self) -> bool {
        self.kind == MetricKind::Euclidean && self.scale == 1.0
    }

    /// `g(x)` padded to 3×3.
    pub fn eval(&self, x: &[f64]) -> Matrix3<f64> {
        let g = match &self.kind {
            MetricKind::Euclidean => Matrix3::identity(),
            MetricKind::BallExpansion { r } => self.expansion_at(*r, x),
            MetricKind::EllipsoidPullback { r, b } => {
                let d: Vec<f64> = b.iter().map(|bi| 1.0 + r * r * bi).collect();
                let dx: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi * di).collect();
                let mut g = self.expansion_at(*r, &dx);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        g[(i, j)] *= d[i] * d[j];
                    }
                }
                g
            }
            MetricKind::SpaceformExact { k, r } => {
                let rho2: f64 = x.iter().map(|v| v * v).sum();
                let rho = rho2.sqrt();
                let s = sn_over_rho(*k, r * rho);
                let t = s * s;
                let mut g = Matrix3::identity();
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let radial = if rho2 > 0.0 { x[i] * x[j] / rho2 } else { 0.0 };
                        let delta = (i == j) as u8 as f64;
                        g[(i, j)] = radial + t * (delta - radial);
                    }
                }
                g
            }
        };
        if self.scale == 1.0 {
            g
        } else {
            let mut g = g * self.scale;
            for i in self.dim..3 {
                g[(i, i)] = 1.0;
            }
            g
        }
    }

    fn expansion_at(&self, r: f64, x: &[f64]) -> Matrix3<f64> {
        let n = self.dim;
        let mut g = Matrix3::identity();
        let r2 = r * r;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        acc += self.quadratic[((i * n + j) * n + k) * n + l] * x[k] * x[l];
                    }
                }
                g[(i, j)] += r2 * acc;
            }
        }
        g
    }

    /// `√det g(x)`.
    pub fn volume_density(&self, x: &[f64]) -> f64 {
        self.eval(x).determinant().max(0.0).sqrt()
    }

    /// Smallest eigenvalue of `g(x)` restricted to the tangent space.
    pub fn min_eigenvalue(&self, x: &[f64]) -> f64 {
        let g = self.eval(x);
        match self.dim {
            2 => {
                let (a, b, c) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
                let mid = 0.5 * (a + c);
                let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                mid - rad
            }
            _ => SymmetricEigen::new(g).eigenvalues.min(),
        }
    }

    /// Checks positive definiteness at the given points.
    pub fn check_points<'a, I: IntoIterator<Item = &'a [f64]>>(&self, points: I) -> Result<()> {
        for p in points {
            let m = self.min_eigenvalue(p);
            if !(m > 0.0) {
                return Err(Error::RadiusTooLarge { r: self.radius(), point: p.to_vec(), min_eig: m });
            }
        }
        Ok(())
    }

    /// Positivity on [`POSITIVITY_SAMPLES`] quasi-random interior points plus
    /// a ring of boundary points.
    pub fn check_positive(&self) -> Result<()> {
        let pts = ball_sample_points(self.dim, POSITIVITY_SAMPLES);
        self.check_points(pts.chunks(self.dim))
    }

    /// The radius parameter of the field (0 for Euclidean).
    pub fn radius(&self) -> f64 {
        match &self.kind {
            MetricKind::Euclidean => 0.0,
            MetricKind::BallExpansion { r }
            | MetricKind::EllipsoidPullback { r, .. }
            | MetricKind::SpaceformExact { r, .. } => *r,
        }
    }

    /// Short tag for report rows.
    pub fn tag(&self) -> &'static str {
        match self.kind {
            MetricKind::Euclidean => "euclidean",
            MetricKind::BallExpansion { .. } => "ball_expansion",
            MetricKind::EllipsoidPullback { .. } => "ellipsoid_pullback",
            MetricKind::SpaceformExact { .. } => "spaceform_exact",
        }
    }
}

fn quadratic_coefficients(model: &CurvatureModel) -> Vec<f64> {
    let n = model.dim;
    let mut c = vec![0.0; n.pow(4)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    c[((i * n + j) * n + k) * n + l] = model.riemann.get(k, i, l, j) / 3.0;
                }
            }
        }
    }
    c
}

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: usize, b: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// `count` Halton points of the closed unit ball (flattened, stride `dim`),
/// followed by points on the boundary sphere.
pub fn ball_sample_points(dim: usize, count: usize) -> Vec<f64> {
    const BASES: [usize; 3] = [2, 3, 5];
    let mut out = Vec::with_capacity((count + 64) * dim);
    let mut i = 1;
    let mut kept = 0;
    while kept < count {
        let p: Vec<f64> = (0..dim).map(|d| 2.0 * radical_inverse(i, BASES[d]) - 1.0).collect();
        i += 1;
        if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            out.extend_from_slice(&p);
            kept += 1;
        }
    }
    // boundary: 64 directions from a golden-angle spiral (circle in 2D)
    let m = 64;
    for s in 0..m {
        if dim == 2 {
            let th = 2.0 * std::f64::consts::PI * s as f64 / m as f64;
            out.extend_from_slice(&[th.cos(), th.sin()]);
        } else {
            let z = 1.0 - 2.0 * (s as f64 + 0.5) / m as f64;
            let rho = (1.0 - z * z).sqrt();
            let th = s as f64 * std::f64::consts::PI * (3.0 - 5f64.sqrt());
            out.extend_from_slice(&[rho * th.cos(), rho * th.sin(), z]);
        }
    }
    out
}

/// Parameters of the ellipsoid pullback: `D = diag(1 + r² b_i)` acting on the
/// frame in which Ricci is diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSpec {
    pub model: CurvatureModel,
    pub r: f64,
    pub b: Vec<f64>,
}

impl EllipsoidSpec {
    /// The eccentricity coefficients that make the ellipsoid optimal to
    /// second order.
    pub fn optimal(model: &CurvatureModel, r: f64) -> Result<Self> {
        let c = crate::specfun::derived_constants(model.dim)?;
        Ok(Self { model: model.clone(), r, b: b_coefficients(model, &c) })
    }

    /// Arbitrary trace-free coefficients.
    pub fn with_coefficients(model: &CurvatureModel, r: f64, b: Vec<f64>) -> Result<Self> {
        let spec = Self { model: model.clone(), r, b };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b.len() != self.model.dim {
            return Err(Error::Domain(format!(
                "expected {} eccentricity coefficients, got {}",
                self.model.dim,
                self.b.len()
            )));
        }
        let sum: f64 = self.b.iter().sum();
        let mag: f64 = self.b.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        if sum.abs() > 1e-14 * mag {
            return Err(Error::Domain(format!("eccentricity coefficients sum to {sum:e}, not 0")));
        }
        Ok(())
    }
}

/// `b_i = (α⁺/ν)(R_ii − S/N)`.
pub fn b_coefficients(model: &CurvatureModel, c: &DerivedConstants) -> Vec<f64> {
    let n = model.dim as f64;
    let mean = model.scalar / n;
    let mut b: Vec<f64> = model.ricci_diag.iter().map(|r| c.alpha_plus / c.nu * (r - mean)).collect();
    // remove the rounding residue so the coefficients are exactly trace-free
    let drift: f64 = b.iter().sum::<f64>() / n;
    b.iter_mut().for_each(|v| *v -= drift);
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_matches_hand_formula_for_space_form() {
        // g = δ − (r²/3)(|x|² δ − x xᵀ) for the unit-curvature space form
        let m = CurvatureModel::space_form(3, 1.0);
        let r = 0.4;
        let f = MetricField::ball_expansion(&m, r).unwrap();
        let x = [0.3, -0.2, 0.5];
        let g = f.eval(&x);
        let x2: f64 = x.iter().map(|v| v * v).sum();
        for i in 0..3 {
            for j in 0..3 {
                let delta = (i == j) as u8 as f64;
                let want = delta - r * r / 3.0 * (x2 * delta - x[i] * x[j]);
                assert!((g[(i, j)] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_space_form_agrees_with_expansion_to_second_order() {
        let m = CurvatureModel::space_form(2, 1.0);
        let x = [0.6, 0.3];
        for r in [0.1, 0.05] {
            let e = MetricField::spaceform_exact(2, 1.0, r).unwrap().eval(&x);
            let q = MetricField::ball_expansion(&m, r).unwrap().eval(&x);
            let diff = (e - q).abs().max();
            assert!(diff < 0.02 * r.powi(4), "r {r}: {diff}");
        }
    }

    #[test]
    fn padding_and_density() {
        let f = MetricField::euclidean(2).unwrap().scaled(4.0).unwrap();
        let g = f.eval(&[0.1, 0.2]);
        assert_eq!(g[(2, 2)], 1.0);
        assert!((f.volume_density(&[0.1, 0.2]) - 4.0).abs() < 1e-15);
        assert!(MetricField::euclidean(4).is_err());
    }

    #[test]
    fn large_radius_is_rejected() {
        // unit curvature: g = δ − (r²/3)(|x|² δ − x xᵀ) loses positivity at r² = 3
        let m = CurvatureModel::space_form(2, 1.0);
        assert!(MetricField::ball_expansion(&m, 1.5).is_ok());
        match MetricField::ball_expansion(&m, 1.8) {
            Err(Error::RadiusTooLarge { min_eig, .. }) => assert!(min_eig <= 0.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(MetricField::spaceform_exact(3, 1.0, 3.2).is_err());
    }

    #[test]
    fn b_coefficients_are_trace_free() {
        let m = CurvatureModel::product(&[(2, 1.0), (1, 0.0)]);
        let c = crate::specfun::derived_constants(3).unwrap();
        let b = b_coefficients(&m, &c);
        assert!(b.iter().sum::<f64>().abs() < 1e-16);
        assert!(b[0] > 0.0 && b[2] < 0.0);
        assert!((b[0] - c.alpha_plus / c.nu / 3.0).abs() < 1e-15);
        assert!(EllipsoidSpec::with_coefficients(&m, 0.1, vec![0.1, 0.0, 0.0]).is_err());
        let spec = EllipsoidSpec::optimal(&m, 0.2).unwrap();
        let f = MetricField::ellipsoid_pullback(&spec).unwrap();
        // at the origin the pullback is D²
        let g = f.eval(&[0.0, 0.0, 0.0]);
        assert!((g[(0, 0)] - (1.0 + 0.04 * b[0]).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn sample_points_lie_in_ball() {
        let p = ball_sample_points(3, 100);
        assert_eq!(p.len(), (100 + 64) * 3);
        for q in p.chunks(3) {
            assert!(q.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12);
        }
    }
}
