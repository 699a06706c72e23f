//! Sparse symmetric matrices, envelope Cholesky factorisation and
//! generalised symmetric eigensolvers (dense and block subspace iteration).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{Error, Result};

/// Square matrix in compressed sparse row form (both triangles stored).
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` entries; duplicates are summed.
#[derive(Debug, Clone, Default)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self { n, entries: Vec::with_capacity(cap) }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i, j, v));
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n: self.n, row_ptr, col_idx, values }
    }
}

impl CsrMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        y
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n).map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>()).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] += v;
            }
        }
        d
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m = m.max((v - self.get(j, i)).abs());
            }
        }
        m
    }

    /// `a A + b B` on the union pattern.
    pub fn linear_combination(a: f64, x: &CsrMatrix, b: f64, y: &CsrMatrix) -> CsrMatrix {
        let mut t = TripletBuilder::with_capacity(x.n, x.nnz() + y.nnz());
        for i in 0..x.n {
            for (j, v) in x.row(i) {
                t.push(i, j, a * v);
            }
            for (j, v) in y.row(i) {
                t.push(i, j, b * v);
            }
        }
        t.build()
    }
}

/// Reverse Cuthill–McKee ordering; `perm[new] = old`.
pub fn rcm_ordering(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut nbrs = Vec::new();
    while order.len() < n {
        // start each component from a pseudo-peripheral node: min degree, then the
        // last node of a BFS sweep from it
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| degree[i]).expect("unvisited node");
        let start = last_bfs_node(a, seed, &visited);
        let begin = order.len();
        visited[start] = true;
        order.push(start);
        let mut head = begin;
        while head < order.len() {
            let v = order[head];
            head += 1;
            nbrs.clear();
            nbrs.extend(a.row(v).map(|(j, _)| j).filter(|&j| !visited[j]));
            nbrs.sort_by_key(|&j| (degree[j], j));
            for &j in &nbrs {
                if !visited[j] {
                    visited[j] = true;
                    order.push(j);
                }
            }
        }
    }
    order.reverse();
    order
}

fn last_bfs_node(a: &CsrMatrix, start: usize, blocked: &[bool]) -> usize {
    let mut seen = blocked.to_vec();
    let mut queue = std::collections::VecDeque::from([start]);
    seen[start] = true;
    let mut last = start;
    while let Some(v) = queue.pop_front() {
        last = v;
        for (j, _) in a.row(v) {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    last
}

/// Cholesky factor `P A Pᵀ = L Lᵀ` stored row-wise over the envelope
/// (from the first non-zero of each row to the diagonal).
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    n: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let perm = rcm_ordering(a);
        Self::factor_with(a, perm)
    }

    pub fn factor_with(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.n;
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old_i in 0..n {
            let i = inv[old_i];
            for (old_j, _) in a.row(old_i) {
                let j = inv[old_j];
                if j < i {
                    first[i] = first[i].min(j);
                }
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for old_i in 0..n {
            let i = inv[old_i];
            for (old_j, v) in a.row(old_i) {
                let j = inv[old_j];
                if j <= i {
                    data[start[i] + j - first[i]] += v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let lo = fi.max(fj);
                let (head, row_i) = data.split_at_mut(start[i]);
                let row_i = &mut row_i[..i - fi + 1];
                let dot: f64 = if j == i {
                    row_i[lo - fi..j - fi].iter().map(|x| x * x).sum()
                } else {
                    let row_j = &head[start[j]..start[j + 1]];
                    row_i[lo - fi..j - fi]
                        .iter()
                        .zip(&row_j[lo - fj..j - fj])
                        .map(|(x, y)| x * y)
                        .sum()
                };
                if j == i {
                    let d = row_i[i - fi] - dot;
                    if !(d > 0.0) {
                        return Err(Error::Linalg(format!(
                            "matrix is not positive definite (pivot {d:e} at row {i})"
                        )));
                    }
                    row_i[i - fi] = d.sqrt();
                } else {
                    let ljj = head[start[j + 1] - 1];
                    row_i[j - fi] = (row_i[j - fi] - dot) / ljj;
                }
            }
        }
        Ok(Self { n, perm, first, start, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        // forward: L y = Pb
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let dot: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(l, v)| l * v).sum();
            y[i] = (y[i] - dot) / row[i - fi];
        }
        // backward: Lᵀ x = y, column-oriented over the stored rows
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (l, v) in row[..i - fi].iter().zip(&mut y[fi..i]) {
                *v -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Eigenpairs of `K u = λ M u`, ascending, with `M`-orthonormal vectors as
/// columns.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub iterations: usize,
}

/// All eigenpairs of the dense pencil `(K, M)`, `M` positive definite.
pub fn dense_generalized_eigen(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<EigenPairs> {
    let n = k.nrows();
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Linalg("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    // C = L⁻¹ K L⁻ᵀ
    let linv_k = l
        .solve_lower_triangular(k)
        .ok_or_else(|| Error::Linalg("singular mass factor".into()))?;
    let c = l
        .solve_lower_triangular(&linv_k.transpose())
        .ok_or_else(|| Error::Linalg("singular mass factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    let vectors = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::Linalg("singular mass factor".into()))?;
    Ok(EigenPairs { values, vectors, iterations: 0 })
}

/// Options for [`subspace_iteration`].
#[derive(Debug, Clone, Copy)]
pub struct SubspaceOptions {
    /// Shift: the factorised operator is `K + shift · M`.
    pub shift: f64,
    /// Extra block columns beyond the requested pairs.
    pub guard: usize,
    pub max_iterations: usize,
    /// Relative change of the wanted Ritz values between sweeps.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        Self { shift: 1.0, guard: 6, max_iterations: 300, tol: 1e-13, seed: 0x5eed }
    }
}

/// Lowest `nev` eigenpairs of `K u = λ M u` by block inverse subspace
/// iteration with Rayleigh–Ritz projection, using one envelope factorisation
/// of `K + shift · M`.
pub fn subspace_iteration(k: &CsrMatrix, m: &CsrMatrix, nev: usize, opts: SubspaceOptions) -> Result<EigenPairs> {
    let n = k.n();
    let p = (nev + opts.guard).min(n);
    if nev == 0 || nev > n {
        return Err(Error::Linalg(format!("cannot compute {nev} eigenpairs of a size-{n} problem")));
    }
    let shifted = CsrMatrix::linear_combination(1.0, k, opts.shift, m);
    let chol = EnvelopeCholesky::factor(&shifted)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x = DMatrix::from_fn(n, p, |_, _| rng.random::<f64>() - 0.5);
    let mut previous = vec![f64::INFINITY; nev];
    let mut last_change = f64::INFINITY;
    for iter in 1..=opts.max_iterations {
        // Y = A⁻¹ M X
        let cols: Vec<Vec<f64>> = (0..p)
            .into_par_iter()
            .map(|c| {
                let xc: Vec<f64> = x.column(c).iter().copied().collect();
                chol.solve(&m.apply(&xc))
            })
            .collect();
        let y = DMatrix::from_fn(n, p, |i, j| cols[j][i]);
        let ky = csr_times_dense(k, &y);
        let my = csr_times_dense(m, &y);
        let kr = y.transpose() * &ky;
        let mr = y.transpose() * &my;
        let kr = (&kr + kr.transpose()) * 0.5;
        let mr = (&mr + mr.transpose()) * 0.5;
        let ritz = dense_generalized_eigen(&kr, &mr)?;
        x = &y * &ritz.vectors;
        let change = (0..nev)
            .map(|i| (ritz.values[i] - previous[i]).abs() / ritz.values[i].abs().max(1.0))
            .fold(0.0f64, f64::max);
        previous.copy_from_slice(&ritz.values[..nev]);
        last_change = change;
        if change <= opts.tol && iter >= 3 {
            let vectors = x.columns(0, nev).into_owned();
            return Ok(EigenPairs { values: previous, vectors, iterations: iter });
        }
    }
    Err(Error::Solver { iterations: opts.max_iterations, residual: last_change })
}

fn csr_times_dense(a: &CsrMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, p) = x.shape();
    let mut out = DMatrix::zeros(n, p);
    for c in 0..p {
        let col = x.column(c);
        for i in 0..n {
            out[(i, c)] = a.row(i).map(|(j, v)| v * col[j]).sum();
        }
    }
    out
}

/// Least-squares solution of `A c ≈ y` and the 2-norm condition number of `A`.
pub fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    if a.nrows() < a.ncols() {
        return Err(Error::Fit(format!(
            "{} samples cannot determine {} coefficients",
            a.nrows(),
            a.ncols()
        )));
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let c = svd
        .solve(y, smax * 1e-15)
        .map_err(|e| Error::Fit(format!("least squares failed: {e}")))?;
    Ok((c, cond))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 1D Laplacian with Neumann ends plus mass, both tridiagonal.
    fn path_pencil(n: usize) -> (CsrMatrix, CsrMatrix) {
        let h = 1.0 / (n - 1) as f64;
        let mut k = TripletBuilder::new(n);
        let mut m = TripletBuilder::new(n);
        for e in 0..n - 1 {
            let (a, b) = (e, e + 1);
            for (i, j, kv, mv) in [
                (a, a, 1.0 / h, h / 3.0),
                (b, b, 1.0 / h, h / 3.0),
                (a, b, -1.0 / h, h / 6.0),
                (b, a, -1.0 / h, h / 6.0),
            ] {
                k.push(i, j, kv);
                m.push(i, j, mv);
            }
        }
        (k.build(), m.build())
    }

    #[test]
    fn triplets_sum_duplicates() {
        let mut t = TripletBuilder::new(2);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        t.push(1, 0, 4.0);
        let a = t.build();
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 0), 4.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn envelope_cholesky_solves() {
        let (k, m) = path_pencil(40);
        let a = CsrMatrix::linear_combination(1.0, &k, 1.0, &m);
        let chol = EnvelopeCholesky::factor(&a).unwrap();
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = chol.solve(&b);
        let r = a.apply(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-12);
        }
        // a singular matrix is rejected
        assert!(EnvelopeCholesky::factor(&k).is_err());
    }

    #[test]
    fn rcm_is_a_permutation_and_shrinks_envelope() {
        // path graph numbered in a scrambled order
        let n = 50;
        let label: Vec<usize> = (0..n).map(|i| (i * 17) % n).collect();
        let mut t = TripletBuilder::new(n);
        for i in 0..n {
            t.push(label[i], label[i], 4.0);
            if i + 1 < n {
                t.push(label[i], label[i + 1], -1.0);
                t.push(label[i + 1], label[i], -1.0);
            }
        }
        let a = t.build();
        let perm = rcm_ordering(&a);
        let mut sorted = perm.clone();
        sorted.sort();
        assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        let identity = EnvelopeCholesky::factor_with(&a, (0..n).collect()).unwrap();
        let rcm = EnvelopeCholesky::factor(&a).unwrap();
        assert_eq!(rcm.envelope_size(), 2 * n - 1);
        assert!(identity.envelope_size() > rcm.envelope_size());
    }

    #[test]
    fn subspace_matches_dense() {
        let (k, m) = path_pencil(60);
        let dense = dense_generalized_eigen(&k.to_dense(), &m.to_dense()).unwrap();
        let sub = subspace_iteration(&k, &m, 4, SubspaceOptions::default()).unwrap();
        for i in 0..4 {
            assert!((dense.values[i] - sub.values[i]).abs() < 1e-10 * dense.values[i].max(1.0), "pair {i}");
        }
        assert!(dense.values[0].abs() < 1e-10);
        // continuum value π² for the second Neumann eigenvalue on [0, 1]
        assert!((dense.values[1] - std::f64::consts::PI.powi(2)).abs() < 1e-2);
        // M-orthonormal vectors
        let v: Vec<f64> = sub.vectors.column(1).iter().copied().collect();
        assert!((m.bilinear(&v, &v) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn least_squares_recovers_polynomial() {
        let xs = [0.1f64, 0.2, 0.3, 0.4, 0.5, 0.6];
        let a = DMatrix::from_fn(6, 3, |i, j| xs[i].powi(j as i32));
        let y = DVector::from_iterator(6, xs.iter().map(|x| 2.0 - x + 0.5 * x * x));
        let (c, cond) = least_squares(&a, &y).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-12 && (c[1] + 1.0).abs() < 1e-11 && (c[2] - 0.5).abs() < 1e-10);
        assert!(cond > 1.0 && cond.is_finite());
        assert!(least_squares(&a.rows(0, 2).into_owned(), &y.rows(0, 2).into_owned()).is_err());
    }
}
