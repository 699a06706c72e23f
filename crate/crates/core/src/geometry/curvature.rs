//! Curvature tensors at a base point.
//!
//! Index convention: `R_ijkl = ⟨R(E_i, E_j) E_k, E_l⟩` and
//! `Ric_ij = −Σ_k R_ikjk`. With this convention the space form of sectional
//! curvature `k` has `R_ijkl = k (δ_il δ_jk − δ_ik δ_jl)` and `Ric = (N−1) k`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on the algebraic identities of a curvature tensor.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// A rank-4 array `R_ijkl` stored row-major in `(i, j, k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTensor {
    dim: usize,
    data: Vec<f64>,
}

impl RiemannTensor {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim.pow(4)] }
    }

    pub fn from_flat(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim.pow(4) {
            return Err(Error::InvalidCurvature {
                identity: "shape dim^4",
                violation: data.len() as f64,
            });
        }
        Ok(Self { dim, data })
    }

    /// Constant sectional curvature `k`.
    pub fn space_form(dim: usize, k: f64) -> Self {
        Self::product(&[(dim, k)])
    }

    /// Riemannian product of space forms: `blocks[i] = (factor dimension,
    /// sectional curvature)`. `[(2, 1.0), (1, 0.0)]` is `S² × ℝ`.
    pub fn product(blocks: &[(usize, f64)]) -> Self {
        let dim = blocks.iter().map(|b| b.0).sum();
        let mut t = Self::zeros(dim);
        let mut offset = 0;
        for &(d, k) in blocks {
            let idx = offset..offset + d;
            for i in idx.clone() {
                for j in idx.clone() {
                    for kk in idx.clone() {
                        for l in idx.clone() {
                            let dil = (i == l) as u8 as f64;
                            let djk = (j == kk) as u8 as f64;
                            let dik = (i == kk) as u8 as f64;
                            let djl = (j == l) as u8 as f64;
                            *t.get_mut(i, j, kk, l) = k * (dil * djk - dik * djl);
                        }
                    }
                }
            }
            offset += d;
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.index(i, j, k, l)]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize, k: usize, l: usize) -> &mut f64 {
        let idx = self.index(i, j, k, l);
        &mut self.data[idx]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Ric_ij = −Σ_k R_ikjk`.
    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |i, j| -(0..n).map(|k| self.get(i, k, j, k)).sum::<f64>())
    }

    /// Largest violation of each identity, in the order antisymmetry in the
    /// first pair, antisymmetry in the second pair, pair symmetry, Bianchi.
    pub fn symmetry_violations(&self) -> [(&'static str, f64); 4] {
        let n = self.dim;
        let mut v = [0.0f64; 4];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = self.get(i, j, k, l);
                        v[0] = v[0].max((r + self.get(j, i, k, l)).abs());
                        v[1] = v[1].max((r + self.get(i, j, l, k)).abs());
                        v[2] = v[2].max((r - self.get(k, l, i, j)).abs());
                        v[3] = v[3].max((r + self.get(i, k, l, j) + self.get(i, l, j, k)).abs());
                    }
                }
            }
        }
        [
            ("R_ijkl = -R_jikl", v[0]),
            ("R_ijkl = -R_ijlk", v[1]),
            ("R_ijkl = R_klij", v[2]),
            ("R_ijkl + R_iklj + R_iljk = 0", v[3]),
        ]
    }

    /// Components in the frame whose vectors are the columns of `q`
    /// (`R'_abcd = Σ q_ia q_jb q_kc q_ld R_ijkl`).
    pub fn rotated(&self, q: &DMatrix<f64>) -> Self {
        let n = self.dim;
        let mut cur = self.data.clone();
        // contract one slot at a time
        for slot in 0..4 {
            let mut next = vec![0.0; cur.len()];
            let stride = n.pow(3 - slot as u32);
            for (idx, out) in next.iter_mut().enumerate() {
                let a = (idx / stride) % n;
                let base = idx - a * stride;
                *out = (0..n).map(|i| q[(i, a)] * cur[base + i * stride]).sum();
            }
            cur = next;
        }
        Self { dim: n, data: cur }
    }
}

/// Validated curvature data at a base point, expressed in an orthonormal
/// frame in which the Ricci tensor is diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureModel {
    pub dim: usize,
    /// Tensor components in the Ricci-diagonalising frame.
    pub riemann: RiemannTensor,
    pub ricci_diag: Vec<f64>,
    pub scalar: f64,
    pub ricci_min: f64,
    /// Columns are the frame vectors, in the coordinates of the input tensor.
    pub rotation: DMatrix<f64>,
}

/// Checks the curvature identities, computes Ricci and rotates the frame so
/// that Ricci is diagonal.
pub fn validate_curvature(riemann: &RiemannTensor) -> Result<CurvatureModel> {
    let scale = riemann.max_abs().max(1.0);
    for (identity, violation) in riemann.symmetry_violations() {
        if violation > SYMMETRY_TOL * scale {
            return Err(Error::InvalidCurvature { identity, violation });
        }
    }
    let n = riemann.dim();
    let ric = riemann.ricci();
    let off_diag = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max(ric[(i, j)].abs()));
    let (rotation, rotated) = if off_diag <= 1e-14 * scale {
        (DMatrix::identity(n, n), riemann.clone())
    } else {
        let eig = ric.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let q = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        let rot = riemann.rotated(&q);
        (q, rot)
    };
    let ric_rot = rotated.ricci();
    let ricci_diag: Vec<f64> = (0..n).map(|i| ric_rot[(i, i)]).collect();
    let scalar = ricci_diag.iter().sum();
    let ricci_min = ricci_diag.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CurvatureModel {
        dim: n,
        riemann: rotated,
        ricci_diag,
        scalar,
        ricci_min,
        rotation,
    })
}

impl CurvatureModel {
    pub fn euclidean(dim: usize) -> Self {
        validate_curvature(&RiemannTensor::zeros(dim)).expect("zero tensor is valid")
    }

    pub fn space_form(dim: usize, k: f64) -> Self {
        validate_curvature(&RiemannTensor::space_form(dim, k)).expect("space form is valid")
    }

    pub fn product(blocks: &[(usize, f64)]) -> Self {
        validate_curvature(&RiemannTensor::product(blocks)).expect("product of space forms is valid")
    }

    /// Whether all Ricci eigenvalues coincide (to `tol`).
    pub fn is_ricci_isotropic(&self, tol: f64) -> bool {
        let mean = self.scalar / self.dim as f64;
        self.ricci_diag.iter().all(|r| (r - mean).abs() <= tol)
    }

    /// `Ric(a, a)` for a vector given in the model frame.
    pub fn ricci_quadratic(&self, a: &[f64]) -> f64 {
        self.ricci_diag.iter().zip(a).map(|(r, x)| r * x * x).sum()
    }
}

/// JSON form of a curvature model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurvatureDescriptor {
    Spaceform { dim: usize, k: f64 },
    /// Product of space-form factors, each `{dim, k}`.
    Product { dim: usize, blocks: Vec<ProductBlock> },
    /// Flattened rank-4 array, row-major in `(i, j, k, l)`.
    Custom { dim: usize, riemann: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductBlock {
    pub dim: usize,
    pub k: f64,
}

impl CurvatureDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            Self::Spaceform { dim, .. } | Self::Product { dim, .. } | Self::Custom { dim, .. } => *dim,
        }
    }

    pub fn tensor(&self) -> Result<RiemannTensor> {
        match self {
            Self::Spaceform { dim, k } => Ok(RiemannTensor::space_form(*dim, *k)),
            Self::Product { dim, blocks } => {
                let total: usize = blocks.iter().map(|b| b.dim).sum();
                if total != *dim {
                    return Err(Error::Domain(format!(
                        "product blocks span dimension {total}, expected {dim}"
                    )));
                }
                let b: Vec<(usize, f64)> = blocks.iter().map(|b| (b.dim, b.k)).collect();
                Ok(RiemannTensor::product(&b))
            }
            Self::Custom { dim, riemann } => RiemannTensor::from_flat(*dim, riemann.clone()),
        }
    }

    pub fn model(&self) -> Result<CurvatureModel> {
        validate_curvature(&self.tensor()?)
    }

    /// Short tag used in report rows.
    pub fn tag(&self) -> String {
        match self {
            Self::Spaceform { dim, k } => format!("spaceform(N={dim},k={k})"),
            Self::Product { blocks, .. } => {
                let parts: Vec<String> = blocks.iter().map(|b| format!("{}:{}", b.dim, b.k)).collect();
                format!("product({})", parts.join("x"))
            }
            Self::Custom { dim, .. } => format!("custom(N={dim})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_form_invariants() {
        let m = CurvatureModel::space_form(3, 1.0);
        assert_eq!(m.ricci_diag, vec![2.0, 2.0, 2.0]);
        assert_eq!(m.scalar, 6.0);
        assert_eq!(m.ricci_min, 2.0);
        // S = N(N−1)k
        let m = CurvatureModel::space_form(4, -0.5);
        assert!((m.scalar - (-6.0)).abs() < 1e-15);
    }

    #[test]
    fn product_plane_contraction() {
        // direct contraction oracle: only R_1221 = R_2112 = 1, R_1212 = R_2121 = −1
        let mut t = RiemannTensor::zeros(3);
        *t.get_mut(0, 1, 1, 0) = 1.0;
        *t.get_mut(1, 0, 0, 1) = 1.0;
        *t.get_mut(0, 1, 0, 1) = -1.0;
        *t.get_mut(1, 0, 1, 0) = -1.0;
        assert_eq!(t, RiemannTensor::product(&[(2, 1.0), (1, 0.0)]));
        let m = validate_curvature(&t).unwrap();
        assert_eq!(m.ricci_diag, vec![1.0, 1.0, 0.0]);
        assert_eq!(m.scalar, 2.0);
        assert_eq!(m.ricci_min, 0.0);
    }

    #[test]
    fn zero_tensor_model() {
        let m = CurvatureModel::euclidean(3);
        assert!(m.ricci_diag.iter().all(|&r| r == 0.0));
        assert_eq!(m.scalar, 0.0);
        assert_eq!(m.ricci_min, 0.0);
    }

    #[test]
    fn violations_are_named() {
        let mut t = RiemannTensor::zeros(2);
        *t.get_mut(0, 1, 1, 0) = 1.0;
        match validate_curvature(&t) {
            Err(Error::InvalidCurvature { identity, .. }) => assert_eq!(identity, "R_ijkl = -R_jikl"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(RiemannTensor::from_flat(3, vec![0.0; 80]).is_err());
    }

    #[test]
    fn rotation_diagonalises_ricci() {
        // rotate S² × ℝ by a generic orthogonal matrix; validation must undo it
        let base = RiemannTensor::product(&[(2, 1.0), (1, 0.0)]);
        let (c, s) = (0.6f64, 0.8f64);
        let q1 = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c]);
        let q2 = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let tilted = base.rotated(&(q1 * q2));
        let ric = tilted.ricci();
        assert!(ric[(0, 2)].abs() > 1e-3, "test tensor should have off-diagonal Ricci");
        let m = validate_curvature(&tilted).unwrap();
        let mut diag = m.ricci_diag.clone();
        diag.sort_by(|a, b| b.total_cmp(a));
        for (got, want) in diag.iter().zip([1.0, 1.0, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let r = m.riemann.ricci();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(r[(i, j)].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn descriptor_json_roundtrip() {
        let d: CurvatureDescriptor =
            serde_json::from_str(r#"{"kind":"product","dim":3,"blocks":[{"dim":2,"k":1.0},{"dim":1,"k":0.0}]}"#)
                .unwrap();
        let m = d.model().unwrap();
        assert_eq!(m.ricci_diag, vec![1.0, 1.0, 0.0]);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<CurvatureDescriptor>(&s).unwrap(), d);
        let bad = CurvatureDescriptor::Custom { dim: 2, riemann: vec![0.0; 15] };
        assert!(bad.model().is_err());
    }
}
