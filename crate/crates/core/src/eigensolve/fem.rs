//! P1 finite elements for the Neumann eigenproblem of `−Δ_g`.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::Mesh;
use crate::geometry::MetricField;
use crate::linalg::{self, CsrMatrix, SubspaceOptions, TripletBuilder};
use crate::{Error, Result};

/// Stiffness `∫ √det g g^{ij} ∂_i φ_a ∂_j φ_b` and mass `∫ √det g φ_a φ_b`.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
}

/// Quadrature on the reference simplex: barycentric points, weights summing to 1.
fn cell_rule(dim: usize) -> (Vec<[f64; 4]>, Vec<f64>) {
    if dim == 2 {
        // edge midpoints, exact for quadratics
        (
            vec![[0.5, 0.5, 0.0, 0.0], [0.0, 0.5, 0.5, 0.0], [0.5, 0.0, 0.5, 0.0]],
            vec![1.0 / 3.0; 3],
        )
    } else {
        // symmetric 4-point rule, exact for quadratics
        let a = 0.585_410_196_624_968_5;
        let b = 0.138_196_601_125_010_5;
        (
            vec![[a, b, b, b], [b, a, b, b], [b, b, a, b], [b, b, b, a]],
            vec![0.25; 4],
        )
    }
}

pub fn assemble(mesh: &Mesh, metric: &MetricField) -> Result<Assembly> {
    let dim = mesh.dim();
    if metric.dim() != dim {
        return Err(Error::Metric(format!(
            "metric dimension {} does not match mesh dimension {dim}",
            metric.dim()
        )));
    }
    metric.check_points(mesh.vertices())?;
    let (points, weights) = cell_rule(dim);
    let k = dim + 1;
    let n_cells = mesh.n_cells();
    let chunk = 4096;
    let pieces: Vec<Result<(Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>)>> = (0..n_cells)
        .collect::<Vec<_>>()
        .par_chunks(chunk)
        .map(|cells| {
            let mut ks = Vec::with_capacity(cells.len() * k * k);
            let mut ms = Vec::with_capacity(cells.len() * k * k);
            for &c in cells {
                let cell = mesh.cell(c);
                let v0 = mesh.vertex(cell[0]);
                let mut jac = Matrix3::identity();
                for j in 0..dim {
                    let vj = mesh.vertex(cell[j + 1]);
                    for i in 0..dim {
                        jac[(i, j)] = vj[i] - v0[i];
                    }
                }
                let det_j = jac.determinant();
                let vol = det_j.abs() / if dim == 2 { 2.0 } else { 6.0 };
                let jinv = jac
                    .try_inverse()
                    .ok_or_else(|| Error::Mesh(format!("cell {c} is degenerate")))?;
                let mut grads = [Vector3::zeros(); 4];
                for a in 1..k {
                    grads[a] = jinv.row(a - 1).transpose();
                    grads[0] -= grads[a];
                }
                let mut kl = [[0.0; 4]; 4];
                let mut ml = [[0.0; 4]; 4];
                let mut x = [0.0; 3];
                for (bary, &w) in points.iter().zip(&weights) {
                    for d in 0..dim {
                        x[d] = (0..k).map(|a| bary[a] * mesh.vertex(cell[a])[d]).sum();
                    }
                    let g = metric.eval(&x[..dim]);
                    let det = g.determinant();
                    if !(det > 0.0) {
                        return Err(Error::Metric(format!("metric determinant {det:e} at {:?}", &x[..dim])));
                    }
                    let ginv = g
                        .try_inverse()
                        .ok_or_else(|| Error::Metric(format!("singular metric at {:?}", &x[..dim])))?;
                    let s = det.sqrt() * w * vol;
                    for a in 0..k {
                        let ga = ginv * grads[a];
                        for b in a..k {
                            kl[a][b] += s * ga.dot(&grads[b]);
                            ml[a][b] += s * bary[a] * bary[b];
                        }
                    }
                }
                for a in 0..k {
                    for b in a..k {
                        ks.push((cell[a], cell[b], kl[a][b]));
                        ms.push((cell[a], cell[b], ml[a][b]));
                        if a != b {
                            ks.push((cell[b], cell[a], kl[a][b]));
                            ms.push((cell[b], cell[a], ml[a][b]));
                        }
                    }
                }
            }
            Ok((ks, ms))
        })
        .collect();
    let nv = mesh.n_vertices();
    let mut kb = TripletBuilder::with_capacity(nv, n_cells * k * k);
    let mut mb = TripletBuilder::with_capacity(nv, n_cells * k * k);
    for piece in pieces {
        let (ks, ms) = piece?;
        ks.into_iter().for_each(|(i, j, v)| kb.push(i, j, v));
        ms.into_iter().for_each(|(i, j, v)| mb.push(i, j, v));
    }
    Ok(Assembly { stiffness: kb.build(), mass: mb.build() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fem,
    Shooting,
}

/// Outcome of a Neumann eigenvalue computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigResult {
    pub mu2: f64,
    /// Vertex values of the eigenfunction, `M`-normalised and mean-free.
    pub eigvec: Vec<f64>,
    /// `‖K u − μ M u‖ / ‖K u‖`.
    pub residual: f64,
    /// `|∫ u dv_g| / (‖1‖ ‖u‖)` in the discrete `M` inner product.
    pub mean_violation: f64,
    /// Nominal mesh size.
    pub mesh_h: f64,
    /// Largest cell edge.
    pub mesh_h_max: f64,
    pub n_dofs: usize,
    pub method: Method,
    /// `"dense"` or `"subspace"`.
    pub solver: String,
    /// Lowest computed eigenvalues, ascending (the first is the kernel).
    pub spectrum: Vec<f64>,
    pub iterations: usize,
}

/// Solver settings for [`neumann_mu2`].
#[derive(Debug, Clone, Copy)]
pub struct EigOptions {
    /// Largest problem solved by the dense generalised eigensolver.
    pub dense_limit: usize,
    /// Number of eigenpairs to compute; `None` means `dim + 2`.
    pub nev: Option<usize>,
    pub subspace: SubspaceOptions,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self { dense_limit: 600, nev: None, subspace: SubspaceOptions::default() }
    }
}

/// First nontrivial Neumann eigenvalue of `−Δ_g` on the mesh.
pub fn neumann_mu2(mesh: &Mesh, metric: &MetricField) -> Result<EigResult> {
    neumann_mu2_with(mesh, metric, &EigOptions::default())
}

pub fn neumann_mu2_with(mesh: &Mesh, metric: &MetricField, opts: &EigOptions) -> Result<EigResult> {
    let asm = assemble(mesh, metric)?;
    let n = mesh.n_vertices();
    let nev = opts.nev.unwrap_or(mesh.dim() + 2).clamp(2, n);
    let (pairs, solver) = if n <= opts.dense_limit {
        (linalg::dense_generalized_eigen(&asm.stiffness.to_dense(), &asm.mass.to_dense())?, "dense")
    } else {
        (linalg::subspace_iteration(&asm.stiffness, &asm.mass, nev, opts.subspace)?, "subspace")
    };
    let mu2 = pairs.values[1];
    let mut u: Vec<f64> = pairs.vectors.column(1).iter().copied().collect();
    // project out the constant in the M inner product, then renormalise
    let ones = vec![1.0; n];
    let m_ones = asm.mass.apply(&ones);
    let total: f64 = m_ones.iter().sum();
    let mean = m_ones.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() / total;
    u.iter_mut().for_each(|v| *v -= mean);
    let norm = asm.mass.bilinear(&u, &u).sqrt();
    u.iter_mut().for_each(|v| *v /= norm);
    let ku = asm.stiffness.apply(&u);
    let mu = asm.mass.apply(&u);
    let rnorm = ku.iter().zip(&mu).map(|(a, b)| (a - mu2 * b).powi(2)).sum::<f64>().sqrt();
    let knorm = ku.iter().map(|a| a * a).sum::<f64>().sqrt();
    let residual = rnorm / knorm.max(f64::MIN_POSITIVE);
    let mean_violation = m_ones.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>().abs() / total.sqrt();
    Ok(EigResult {
        mu2,
        eigvec: u,
        residual,
        mean_violation,
        mesh_h: mesh.h(),
        mesh_h_max: mesh.max_diameter(),
        n_dofs: n,
        method: Method::Fem,
        solver: solver.to_string(),
        spectrum: pairs.values.iter().take(nev).copied().collect(),
        iterations: pairs.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constants_are_in_the_kernel() {
        let mesh = Mesh::disk_rings(6);
        let asm = assemble(&mesh, &MetricField::euclidean(2).unwrap()).unwrap();
        let ones = vec![1.0; mesh.n_vertices()];
        let k1 = asm.stiffness.apply(&ones);
        assert!(k1.iter().all(|v| v.abs() < 1e-12));
        let area = asm.mass.bilinear(&ones, &ones);
        assert!((area - mesh.total_volume()).abs() < 1e-12);
        assert!(asm.stiffness.asymmetry() < 1e-14);
    }

    #[test]
    fn disk_mu2_close_to_bessel_value() {
        let mesh = Mesh::disk_rings(12);
        let r = neumann_mu2(&mesh, &MetricField::euclidean(2).unwrap()).unwrap();
        let exact = crate::specfun::mu2_ball(2).unwrap().mu2;
        assert!((r.mu2 - exact).abs() < 0.02 * exact, "{}", r.mu2);
        assert!(r.spectrum[0].abs() < 1e-9);
        // exact double degeneracy on the symmetric mesh
        assert!((r.spectrum[1] - r.spectrum[2]).abs() < 1e-9 * r.mu2);
        assert!(r.mean_violation < 1e-12);
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn dense_and_subspace_agree() {
        let mesh = Mesh::disk_rings(10);
        let metric = MetricField::euclidean(2).unwrap();
        let dense = neumann_mu2_with(&mesh, &metric, &EigOptions { dense_limit: 10_000, ..Default::default() }).unwrap();
        let sparse = neumann_mu2_with(&mesh, &metric, &EigOptions { dense_limit: 0, ..Default::default() }).unwrap();
        assert_eq!(dense.solver, "dense");
        assert_eq!(sparse.solver, "subspace");
        assert!((dense.mu2 - sparse.mu2).abs() < 1e-10 * dense.mu2);
        assert!(sparse.residual < 1e-7 && sparse.mean_violation < 1e-8);
    }

    #[test]
    fn scaling_the_metric_scales_mu2() {
        let mesh = Mesh::disk_rings(6);
        let g = MetricField::euclidean(2).unwrap();
        let a = neumann_mu2(&mesh, &g).unwrap().mu2;
        let b = neumann_mu2(&mesh, &g.clone().scaled(4.0).unwrap()).unwrap().mu2;
        assert!((a / b - 4.0).abs() < 1e-10);
    }

    #[test]
    fn rectangle_mu2_is_separable_value() {
        // 2 × 1 rectangle: μ₂ = (π/2)²
        let mesh = Mesh::rectangle(2.0, 1.0, 32, 16).unwrap();
        let r = neumann_mu2(&mesh, &MetricField::euclidean(2).unwrap()).unwrap();
        let exact = (PI / 2.0).powi(2);
        assert!((r.mu2 - exact).abs() < 2e-3 * exact, "{}", r.mu2);
    }

    #[test]
    fn ball_mu2_three_fold() {
        let mesh = Mesh::ball_shells(3);
        let r = neumann_mu2(&mesh, &MetricField::euclidean(3).unwrap()).unwrap();
        let exact = crate::specfun::mu2_ball(3).unwrap().mu2;
        assert!((r.mu2 - exact).abs() < 0.1 * exact, "{}", r.mu2);
        assert!((r.spectrum[3] - r.spectrum[1]).abs() < 1e-8 * r.mu2);
    }

    #[test]
    fn indefinite_metric_is_rejected() {
        let model = crate::geometry::CurvatureModel::space_form(2, 1.0);
        assert!(MetricField::ball_expansion(&model, 2.0).is_err());
        let mesh = Mesh::disk_rings(4);
        assert!(assemble(&mesh, &MetricField::euclidean(3).unwrap()).is_err());
    }
}
