//! Simplicial meshes of the unit ball (2D and 3D), rectangles and perturbed
//! disks.
//!
//! The disk mesh is the triangulated hexagon of the triangular lattice with
//! its `j`-th hexagonal ring mapped onto the circle of radius `j/n`. The
//! ball mesh is a cube grid split into five tetrahedra per cell (alternating
//! orientation so faces match), with the cube shells `‖q‖∞ = j/n` mapped onto
//! spheres of radius `j/n`. The disk mesh keeps the dihedral symmetry of the
//! hexagon and the ball mesh the octahedral symmetry of the cube, so the
//! rotationally degenerate first nontrivial eigenvalue of the continuum
//! problem stays exactly degenerate on the mesh.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::geometry::region::{PerturbedDisk, Region};
use crate::quad::GaussLegendre;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    coords: Vec<f64>,
    cells: Vec<usize>,
    boundary_faces: Vec<usize>,
    /// Nominal mesh size used for extrapolation (`1/n` for the ball meshes).
    h: f64,
}

/// JSON form: `{dim, vertices: [[x, y(, z)]], cells: [[i, j, k(, l)]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshJson {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub cells: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

impl Mesh {
    /// Builds a mesh, orienting cells positively and extracting boundary faces.
    pub fn new(dim: usize, coords: Vec<f64>, mut cells: Vec<usize>, h: Option<f64>) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Mesh(format!("mesh dimension must be 2 or 3, got {dim}")));
        }
        if coords.len() % dim != 0 || cells.len() % (dim + 1) != 0 {
            return Err(Error::Mesh("coordinate or cell array has the wrong stride".into()));
        }
        let nv = coords.len() / dim;
        if let Some(&bad) = cells.iter().find(|&&v| v >= nv) {
            return Err(Error::Mesh(format!("cell references vertex {bad} of {nv}")));
        }
        let k = dim + 1;
        for c in 0..cells.len() / k {
            let vol = signed_volume(dim, &coords, &cells[c * k..(c + 1) * k]);
            if vol.abs() <= 1e-300 {
                return Err(Error::Mesh(format!("cell {c} is degenerate")));
            }
            if vol < 0.0 {
                cells.swap(c * k, c * k + 1);
            }
        }
        let boundary_faces = boundary_faces(dim, &cells)?;
        let mut mesh = Self { dim, coords, cells, boundary_faces, h: 0.0 };
        mesh.h = h.unwrap_or_else(|| mesh.max_diameter());
        Ok(mesh)
    }

    /// Mesh of the closed unit disk (`dim = 2`) or ball (`dim = 3`) with
    /// target size `h`; `n = ⌈1/h⌉` rings/shells and nominal size `1/n`.
    pub fn unit_ball(dim: usize, h: f64) -> Result<Self> {
        let (lo, hi) = if dim == 2 { (0.01, 0.5) } else { (0.05, 0.5) };
        if !(lo..=hi).contains(&h) {
            return Err(Error::Mesh(format!("mesh size {h} outside [{lo}, {hi}] for dimension {dim}")));
        }
        let n = (1.0 / h - 1e-9).ceil() as usize;
        match dim {
            2 => Ok(Self::disk_rings(n)),
            3 => Ok(Self::ball_shells(n)),
            _ => Err(Error::Mesh(format!("mesh dimension must be 2 or 3, got {dim}"))),
        }
    }

    /// Disk mesh with `n` hexagonal rings.
    pub fn disk_rings(n: usize) -> Self {
        let n = n.max(1);
        let ring_start = |j: usize| if j == 0 { 0 } else { 1 + 3 * j * (j - 1) };
        let nv = 1 + 3 * n * (n + 1);
        let mut coords = vec![0.0; 2 * nv];
        for j in 1..=n {
            let m = 6 * j;
            let rad = j as f64 / n as f64;
            for t in 0..m {
                let phi = 2.0 * std::f64::consts::PI * t as f64 / m as f64;
                let v = ring_start(j) + t;
                coords[2 * v] = rad * phi.cos();
                coords[2 * v + 1] = rad * phi.sin();
            }
        }
        let at = |j: usize, idx: usize| if j == 0 { 0 } else { ring_start(j) + idx % (6 * j) };
        let mut cells = Vec::with_capacity(3 * 6 * n * n);
        for j in 1..=n {
            for s in 0..6 {
                for t in 0..j {
                    let o0 = at(j, s * j + t);
                    let o1 = at(j, s * j + t + 1);
                    let i0 = at(j - 1, s * (j - 1) + t);
                    cells.extend_from_slice(&[o0, o1, i0]);
                    if t + 1 < j {
                        let i1 = at(j - 1, s * (j - 1) + t + 1);
                        cells.extend_from_slice(&[i0, o1, i1]);
                    }
                }
            }
        }
        Self::new(2, coords, cells, Some(1.0 / n as f64)).expect("ring mesh is valid")
    }

    /// Ball mesh from the `(2n)³` cube grid.
    pub fn ball_shells(n: usize) -> Self {
        let n = n.max(1);
        let side = 2 * n + 1;
        let idx = |i: usize, j: usize, k: usize| (i * side + j) * side + k;
        let mut coords = Vec::with_capacity(3 * side.pow(3));
        for i in 0..side {
            for j in 0..side {
                for k in 0..side {
                    let q = [
                        i as f64 / n as f64 - 1.0,
                        j as f64 / n as f64 - 1.0,
                        k as f64 / n as f64 - 1.0,
                    ];
                    coords.extend_from_slice(&cube_to_ball(q));
                }
            }
        }
        let mut cells = Vec::with_capacity(20 * (2 * n).pow(3));
        for i in 0..2 * n {
            for j in 0..2 * n {
                for k in 0..2 * n {
                    let c = |a: usize, b: usize, d: usize| idx(i + a, j + b, k + d);
                    let corners = if (i + j + k) % 2 == 0 {
                        [c(0, 0, 0), c(1, 1, 0), c(1, 0, 1), c(0, 1, 1)]
                    } else {
                        [c(1, 0, 0), c(0, 1, 0), c(0, 0, 1), c(1, 1, 1)]
                    };
                    // the central tetrahedron and the four corner tetrahedra cut off by it
                    cells.extend_from_slice(&corners);
                    let all = [
                        c(0, 0, 0), c(1, 0, 0), c(0, 1, 0), c(1, 1, 0),
                        c(0, 0, 1), c(1, 0, 1), c(0, 1, 1), c(1, 1, 1),
                    ];
                    for (bit, &v) in all.iter().enumerate() {
                        if corners.contains(&v) {
                            continue;
                        }
                        // the three cube neighbours of an excluded corner are central corners
                        let nbrs = [bit ^ 1, bit ^ 2, bit ^ 4].map(|b| all[b]);
                        cells.extend_from_slice(&[v, nbrs[0], nbrs[1], nbrs[2]]);
                    }
                }
            }
        }
        Self::new(3, coords, cells, Some(1.0 / n as f64)).expect("shell mesh is valid")
    }

    /// Structured mesh of `[−a/2, a/2] × [−b/2, b/2]` with `nx × ny` cells,
    /// each split along alternating diagonals.
    pub fn rectangle(a: f64, b: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || nx == 0 || ny == 0 {
            return Err(Error::Mesh("rectangle needs positive sides and cell counts".into()));
        }
        let mut coords = Vec::with_capacity(2 * (nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                coords.push(-a / 2.0 + a * i as f64 / nx as f64);
                coords.push(-b / 2.0 + b * j as f64 / ny as f64);
            }
        }
        let v = |i: usize, j: usize| j * (nx + 1) + i;
        let mut cells = Vec::with_capacity(6 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (p00, p10, p01, p11) = (v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1));
                if (i + j) % 2 == 0 {
                    cells.extend_from_slice(&[p00, p10, p11, p00, p11, p01]);
                } else {
                    cells.extend_from_slice(&[p00, p10, p01, p10, p11, p01]);
                }
            }
        }
        let h = (a / nx as f64).max(b / ny as f64);
        Self::new(2, coords, cells, Some(h))
    }

    /// The disk mesh with every vertex pushed radially onto the perturbed disk.
    pub fn perturbed_disk(domain: &PerturbedDisk, n: usize) -> Result<Self> {
        let base = Self::disk_rings(n);
        let mut coords = base.coords.clone();
        for v in coords.chunks_mut(2) {
            let phi = v[1].atan2(v[0]);
            let s = domain.boundary_radius(phi);
            v[0] = domain.center[0] + s * v[0];
            v[1] = domain.center[1] + s * v[1];
        }
        Self::new(2, coords, base.cells, Some(base.h))
    }

    pub fn from_json(json: &MeshJson) -> Result<Self> {
        let dim = json.dim;
        if json.vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::Mesh(format!("every vertex needs {dim} coordinates")));
        }
        if json.cells.iter().any(|c| c.len() != dim + 1) {
            return Err(Error::Mesh(format!("every cell needs {} vertices", dim + 1)));
        }
        let coords = json.vertices.concat();
        let cells = json.cells.concat();
        Self::new(dim, coords, cells, json.h)
    }

    pub fn to_json(&self) -> MeshJson {
        MeshJson {
            dim: self.dim,
            vertices: self.coords.chunks(self.dim).map(|c| c.to_vec()).collect(),
            cells: self.cells.chunks(self.dim + 1).map(|c| c.to_vec()).collect(),
            h: Some(self.h),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.dim)
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.cells[c * k..(c + 1) * k]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> {
        self.cells.chunks(self.dim + 1)
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = &[usize]> {
        self.boundary_faces.chunks(self.dim)
    }

    /// Nominal mesh size.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Largest edge length over all cells.
    pub fn max_diameter(&self) -> f64 {
        let mut m = 0.0f64;
        for cell in self.cells() {
            for a in 0..cell.len() {
                for b in a + 1..cell.len() {
                    let d: f64 = self
                        .vertex(cell[a])
                        .iter()
                        .zip(self.vertex(cell[b]))
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum();
                    m = m.max(d.sqrt());
                }
            }
        }
        m
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        signed_volume(self.dim, &self.coords, self.cell(c))
    }

    /// Sum of cell volumes.
    pub fn total_volume(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_volume(c)).sum()
    }

    /// Checks positivity of every cell and that every interior face is shared
    /// by exactly two cells (boundary faces by one).
    pub fn check_invariants(&self) -> Result<()> {
        for c in 0..self.n_cells() {
            if !(self.cell_volume(c) > 0.0) {
                return Err(Error::Mesh(format!("cell {c} has non-positive volume")));
            }
        }
        boundary_faces(self.dim, &self.cells).map(|_| ())
    }

    /// Vertex indices lying on boundary faces.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.boundary_faces.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Signed volume of a simplex given by vertex indices.
fn signed_volume(dim: usize, coords: &[f64], cell: &[usize]) -> f64 {
    let p = |v: usize, d: usize| coords[cell[v] * dim + d];
    if dim == 2 {
        0.5 * ((p(1, 0) - p(0, 0)) * (p(2, 1) - p(0, 1)) - (p(2, 0) - p(0, 0)) * (p(1, 1) - p(0, 1)))
    } else {
        let e = |v: usize| [p(v, 0) - p(0, 0), p(v, 1) - p(0, 1), p(v, 2) - p(0, 2)];
        let (a, b, c) = (e(1), e(2), e(3));
        (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]))
            / 6.0
    }
}

/// Faces used by exactly one cell; errors if any face is shared by more than two.
fn boundary_faces(dim: usize, cells: &[usize]) -> Result<Vec<usize>> {
    let k = dim + 1;
    let mut count: HashMap<Vec<usize>, (usize, Vec<usize>)> = HashMap::new();
    for cell in cells.chunks(k) {
        for skip in 0..k {
            // keep the orientation induced by the cell for the stored face
            let face: Vec<usize> = (0..k).filter(|&i| i != skip).map(|i| cell[i]).collect();
            let mut key = face.clone();
            key.sort_unstable();
            let e = count.entry(key).or_insert((0, face));
            e.0 += 1;
        }
    }
    let mut out = Vec::new();
    let mut faces: Vec<_> = count.into_iter().collect();
    faces.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    for (key, (n, face)) in faces {
        match n {
            1 => out.extend(face),
            2 => {}
            _ => return Err(Error::Mesh(format!("face {key:?} is shared by {n} cells"))),
        }
    }
    Ok(out)
}

/// Maps a point of the cube `[−1, 1]³` to the ball, sending each shell
/// `‖q‖∞ = s` onto the sphere of radius `s`.
fn cube_to_ball(q: [f64; 3]) -> [f64; 3] {
    let s = q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if s == 0.0 {
        return [0.0; 3];
    }
    let u = [q[0] / s, q[1] / s, q[2] / s];
    let sq = [u[0] * u[0], u[1] * u[1], u[2] * u[2]];
    let x = [
        u[0] * (1.0 - sq[1] / 2.0 - sq[2] / 2.0 + sq[1] * sq[2] / 3.0).sqrt(),
        u[1] * (1.0 - sq[2] / 2.0 - sq[0] / 2.0 + sq[2] * sq[0] / 3.0).sqrt(),
        u[2] * (1.0 - sq[0] / 2.0 - sq[1] / 2.0 + sq[0] * sq[1] / 3.0).sqrt(),
    ];
    // the map lands on the unit sphere; rescale onto radius s
    let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    [s * x[0] / norm, s * x[1] / norm, s * x[2] / norm]
}

/// Meshes are also integration regions: cell-wise quadrature, with cells cut
/// by the kink sphere subdivided.
impl Region for Mesh {
    fn dim(&self) -> usize {
        self.dim
    }

    fn contains(&self, x: &[f64]) -> bool {
        (0..self.n_cells()).any(|c| self.barycentric(c, x).iter().all(|&l| l >= -1e-12))
    }

    fn interior_point(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        let mut v = 0.0;
        for cell in 0..self.n_cells() {
            let w = self.cell_volume(cell);
            v += w;
            for &i in self.cell(cell) {
                for d in 0..self.dim {
                    c[d] += w * self.vertex(i)[d] / (self.dim + 1) as f64;
                }
            }
        }
        c.iter().map(|a| a / v).collect()
    }

    fn quadrature(&self, p: &[f64], kink: f64, visit: &mut dyn FnMut(&[f64], f64)) {
        let rule = SimplexRule::new(self.dim);
        for c in 0..self.n_cells() {
            let verts: Vec<Vec<f64>> = self.cell(c).iter().map(|&i| self.vertex(i).to_vec()).collect();
            subdivide(&verts, p, kink, &rule, 0, visit);
        }
    }

    fn volume(&self) -> f64 {
        self.total_volume()
    }
}

impl Mesh {
    fn barycentric(&self, c: usize, x: &[f64]) -> Vec<f64> {
        let cell = self.cell(c);
        let d = self.dim;
        let v0 = self.vertex(cell[0]);
        let jac = nalgebra::DMatrix::from_fn(d, d, |i, j| self.vertex(cell[j + 1])[i] - v0[i]);
        let rhs = nalgebra::DVector::from_fn(d, |i, _| x[i] - v0[i]);
        match jac.lu().solve(&rhs) {
            Some(l) => {
                let mut out = vec![1.0 - l.sum()];
                out.extend(l.iter());
                out
            }
            None => vec![-1.0; d + 1],
        }
    }
}

/// Collapsed Gauss rule on the reference simplex with all-positive weights.
struct SimplexRule {
    /// barycentric coordinates (stride dim + 1) and weights summing to 1
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl SimplexRule {
    fn new(dim: usize) -> Self {
        let g = GaussLegendre::new(4);
        let nodes: Vec<(f64, f64)> = g.mapped(0.0, 1.0).collect();
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if dim == 2 {
            for &(u, wu) in &nodes {
                for &(v, wv) in &nodes {
                    // Duffy: (u, v) ↦ (u, (1 − u) v)
                    let (x, y) = (u, (1.0 - u) * v);
                    points.extend_from_slice(&[1.0 - x - y, x, y]);
                    weights.push(2.0 * wu * wv * (1.0 - u));
                }
            }
        } else {
            for &(u, wu) in &nodes {
                for &(v, wv) in &nodes {
                    for &(w, ww) in &nodes {
                        let x = u;
                        let y = (1.0 - u) * v;
                        let z = (1.0 - u) * (1.0 - v) * w;
                        points.extend_from_slice(&[1.0 - x - y - z, x, y, z]);
                        weights.push(6.0 * wu * wv * ww * (1.0 - u) * (1.0 - u) * (1.0 - v));
                    }
                }
            }
        }
        Self { points, weights }
    }
}

const MAX_SUBDIVISION: usize = 4;

fn subdivide(
    verts: &[Vec<f64>],
    p: &[f64],
    kink: f64,
    rule: &SimplexRule,
    depth: usize,
    visit: &mut dyn FnMut(&[f64], f64),
) {
    let dim = verts[0].len();
    let dist = |x: &[f64]| x.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let ds: Vec<f64> = verts.iter().map(|v| dist(v)).collect();
    let lo = ds.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ds.iter().copied().fold(0.0, f64::max);
    let diam = verts
        .iter()
        .flat_map(|a| verts.iter().map(move |b| dist_between(a, b)))
        .fold(0.0, f64::max);
    // convex cell: its distances to p lie in [lo − diam, hi]
    let straddles = kink.is_finite() && hi > kink && lo - diam < kink;
    if straddles && depth < MAX_SUBDIVISION {
        for child in split_simplex(verts) {
            subdivide(&child, p, kink, rule, depth + 1, visit);
        }
        return;
    }
    let vol = simplex_volume(verts).abs();
    let k = dim + 1;
    let mut x = vec![0.0; dim];
    for (q, &w) in rule.weights.iter().enumerate() {
        let bary = &rule.points[q * k..(q + 1) * k];
        for d in 0..dim {
            x[d] = (0..k).map(|i| bary[i] * verts[i][d]).sum();
        }
        visit(&x, w * vol);
    }
}

fn dist_between(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn simplex_volume(v: &[Vec<f64>]) -> f64 {
    let dim = v[0].len();
    let flat: Vec<f64> = v.concat();
    let idx: Vec<usize> = (0..=dim).collect();
    signed_volume(dim, &flat, &idx)
}

/// Splits a simplex into `2^dim` children through edge midpoints.
fn split_simplex(v: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    let mid = |a: usize, b: usize| -> Vec<f64> { v[a].iter().zip(&v[b]).map(|(x, y)| 0.5 * (x + y)).collect() };
    if v.len() == 3 {
        let (m01, m12, m02) = (mid(0, 1), mid(1, 2), mid(0, 2));
        vec![
            vec![v[0].clone(), m01.clone(), m02.clone()],
            vec![m01.clone(), v[1].clone(), m12.clone()],
            vec![m02.clone(), m12.clone(), v[2].clone()],
            vec![m01, m12, m02],
        ]
    } else {
        let m = |a, b| mid(a, b);
        let (m01, m02, m03, m12, m13, m23) = (m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3));
        vec![
            vec![v[0].clone(), m01.clone(), m02.clone(), m03.clone()],
            vec![m01.clone(), v[1].clone(), m12.clone(), m13.clone()],
            vec![m02.clone(), m12.clone(), v[2].clone(), m23.clone()],
            vec![m03.clone(), m13.clone(), m23.clone(), v[3].clone()],
            // the inner octahedron, split along the m02–m13 diagonal
            vec![m01.clone(), m02.clone(), m03.clone(), m13.clone()],
            vec![m01.clone(), m02.clone(), m12.clone(), m13.clone()],
            vec![m02.clone(), m03.clone(), m13.clone(), m23.clone()],
            vec![m02, m12, m13, m23],
        ]
    }
}
