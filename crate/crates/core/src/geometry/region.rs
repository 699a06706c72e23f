//! Bounded domains with quadrature rules adapted to integrands that are
//! smooth except across a sphere `|x − p| = kink` about a chosen point.
//!
//! Rules are polar about `p`, so the domain must be star-shaped with respect
//! to `p`.

use std::f64::consts::PI;

use crate::quad::GaussLegendre;
use crate::{Error, Result};

/// Gauss points per angular panel and per radial piece.
const NODES: usize = 24;
/// Angular panels between consecutive angular breakpoints (2D).
const PANELS_2D: usize = 4;
/// Samples used to locate the angles where the boundary crosses the kink.
const CROSSING_SCAN: usize = 1440;
/// Azimuthal trapezoid points (3D).
const AZIMUTH_POINTS: usize = 48;

pub trait Region: Sync {
    fn dim(&self) -> usize;

    fn contains(&self, x: &[f64]) -> bool;

    /// A point with respect to which the region is star-shaped.
    fn interior_point(&self) -> Vec<f64>;

    /// Calls `visit(x, w)` for the nodes of a rule for `∫_Ω f dx`.
    fn quadrature(&self, p: &[f64], kink: f64, visit: &mut dyn FnMut(&[f64], f64));

    /// Euclidean volume.
    fn volume(&self) -> f64 {
        let p = self.interior_point();
        let mut v = 0.0;
        self.quadrature(&p, f64::INFINITY, &mut |_, w| v += w);
        v
    }

    /// Euclidean centroid.
    fn centroid(&self) -> Vec<f64> {
        let p = self.interior_point();
        let mut acc = vec![0.0; self.dim()];
        let mut v = 0.0;
        self.quadrature(&p, f64::INFINITY, &mut |x, w| {
            v += w;
            acc.iter_mut().zip(x).for_each(|(a, xi)| *a += w * xi);
        });
        acc.iter().map(|a| a / v).collect()
    }
}

/// `∫_Ω f dx` with the rule of [`Region::quadrature`].
pub fn integrate<F: FnMut(&[f64]) -> f64>(region: &dyn Region, p: &[f64], kink: f64, mut f: F) -> f64 {
    let mut total = 0.0;
    region.quadrature(p, kink, &mut |x, w| total += w * f(x));
    total
}

/// Ensures `p` is a valid expansion point for the region.
pub fn check_inside(region: &dyn Region, p: &[f64]) -> Result<()> {
    if p.len() != region.dim() || !region.contains(p) {
        return Err(Error::Domain(format!("point {p:?} is not inside the region")));
    }
    Ok(())
}

/// Polar rule in the plane: `exit(θ)` is the distance from `p` to the
/// boundary along direction `θ`; `breaks` are angles where `exit` has kinks.
fn polar_2d(
    p: &[f64],
    kink: f64,
    exit: &dyn Fn(f64) -> f64,
    mut breaks: Vec<f64>,
    visit: &mut dyn FnMut(&[f64], f64),
) {
    let rule = GaussLegendre::new(NODES);
    // angles where the boundary crosses the kink circle
    if kink.is_finite() {
        let step = 2.0 * PI / CROSSING_SCAN as f64;
        let mut prev = exit(0.0) - kink;
        for s in 1..=CROSSING_SCAN {
            let th = step * s as f64;
            let cur = exit(th) - kink;
            if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
                if let Ok(root) = crate::roots::bisect_secant(|t| exit(t) - kink, th - step, th, 1e-15) {
                    breaks.push(root);
                }
            }
            prev = cur;
        }
    }
    breaks.iter_mut().for_each(|b| *b = b.rem_euclid(2.0 * PI));
    breaks.push(0.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let first = breaks[0];
    breaks.push(first + 2.0 * PI);
    let mut x = [0.0; 2];
    for seg in breaks.windows(2) {
        let width = (seg[1] - seg[0]) / PANELS_2D as f64;
        if width <= 0.0 {
            continue;
        }
        for panel in 0..PANELS_2D {
            let lo = seg[0] + width * panel as f64;
            for (th, wt) in rule.mapped(lo, lo + width) {
                let (s, c) = th.sin_cos();
                let r_max = exit(th);
                let mut radial = |a: f64, b: f64| {
                    for (rho, wr) in rule.mapped(a, b) {
                        x[0] = p[0] + rho * c;
                        x[1] = p[1] + rho * s;
                        visit(&x, wt * wr * rho);
                    }
                };
                if r_max > kink {
                    radial(0.0, kink);
                    radial(kink, r_max);
                } else {
                    radial(0.0, r_max);
                }
            }
        }
    }
}

/// A Euclidean ball in dimension 2 or 3.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(2..=3).contains(&center.len()) || !(radius > 0.0) {
            return Err(Error::Domain(format!(
                "ball needs dimension 2 or 3 and a positive radius, got {} and {radius}",
                center.len()
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], 1.0)
    }

    /// Distance from `p` to the sphere along the unit direction `omega`.
    fn exit(&self, p: &[f64], omega: &[f64]) -> f64 {
        let d: Vec<f64> = p.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let dw: f64 = d.iter().zip(omega).map(|(a, b)| a * b).sum();
        let dd: f64 = d.iter().map(|a| a * a).sum();
        let disc = (dw * dw - dd + self.radius * self.radius).max(0.0);
        -dw + disc.sqrt()
    }
}

impl Region for Ball {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= self.radius * self.radius
    }

    fn interior_point(&self) -> Vec<f64> {
        self.center.clone()
    }

    fn quadrature(&self, p: &[f64], kink: f64, visit: &mut dyn FnMut(&[f64], f64)) {
        if self.dim() == 2 {
            let exit = |th: f64| self.exit(p, &[th.cos(), th.sin()]);
            polar_2d(p, kink, &exit, Vec::new(), visit);
            return;
        }
        // 3D: polar axis along p − c so the exit distance depends on the polar angle only
        let d: Vec<f64> = p.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        let dn = d.iter().map(|a| a * a).sum::<f64>().sqrt();
        let e = if dn > 1e-300 { [d[0] / dn, d[1] / dn, d[2] / dn] } else { [0.0, 0.0, 1.0] };
        let (u, v) = orthonormal_complement(e);
        let exit = |th: f64| {
            let (st, ct) = th.sin_cos();
            let w = [st * u[0] + ct * e[0], st * u[1] + ct * e[1], st * u[2] + ct * e[2]];
            self.exit(p, &w)
        };
        let mut breaks = vec![0.0, PI];
        if kink.is_finite() && (exit(0.0) - kink) * (exit(PI) - kink) < 0.0 {
            // exit(θ) is monotone in θ for this axis choice
            if let Ok(t) = crate::roots::bisect_secant(|t| exit(t) - kink, 0.0, PI, 1e-15) {
                breaks.push(t);
            }
        }
        breaks.sort_by(f64::total_cmp);
        let rule = GaussLegendre::new(NODES);
        let dphi = 2.0 * PI / AZIMUTH_POINTS as f64;
        let mut x = [0.0; 3];
        for seg in breaks.windows(2) {
            let width = (seg[1] - seg[0]) / 2.0;
            for panel in 0..2 {
                let lo = seg[0] + width * panel as f64;
                for (th, wt) in rule.mapped(lo, lo + width) {
                    let (st, ct) = th.sin_cos();
                    let r_max = exit(th);
                    for k in 0..AZIMUTH_POINTS {
                        let (sp, cp) = (dphi * k as f64).sin_cos();
                        let w = [
                            st * cp * u[0] + st * sp * v[0] + ct * e[0],
                            st * cp * u[1] + st * sp * v[1] + ct * e[1],
                            st * cp * u[2] + st * sp * v[2] + ct * e[2],
                        ];
                        let mut radial = |a: f64, b: f64| {
                            for (rho, wr) in rule.mapped(a, b) {
                                for i in 0..3 {
                                    x[i] = p[i] + rho * w[i];
                                }
                                visit(&x, wt * dphi * st * wr * rho * rho);
                            }
                        };
                        if r_max > kink {
                            radial(0.0, kink);
                            radial(kink, r_max);
                        } else {
                            radial(0.0, r_max);
                        }
                    }
                }
            }
        }
    }

    fn volume(&self) -> f64 {
        crate::specfun::unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    fn centroid(&self) -> Vec<f64> {
        self.center.clone()
    }
}

fn orthonormal_complement(e: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if e[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = a[0] * e[0] + a[1] * e[1] + a[2] * e[2];
    let mut u = [a[0] - dot * e[0], a[1] - dot * e[1], a[2] - dot * e[2]];
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    u.iter_mut().for_each(|c| *c /= n);
    let v = [
        e[1] * u[2] - e[2] * u[1],
        e[2] * u[0] - e[0] * u[2],
        e[0] * u[1] - e[1] * u[0],
    ];
    (u, v)
}

/// A simple polygon in the plane, stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Domain("polygon needs at least three vertices".into()));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        if signed_area(&vertices) <= 0.0 {
            return Err(Error::Domain("polygon is degenerate".into()));
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle `[−a/2, a/2] × [−b/2, b/2]`.
    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![[-a / 2.0, -b / 2.0], [a / 2.0, -b / 2.0], [a / 2.0, b / 2.0], [-a / 2.0, b / 2.0]])
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    fn exit(&self, p: &[f64], th: f64) -> f64 {
        let (s, c) = th.sin_cos();
        let n = self.vertices.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = [b[0] - a[0], b[1] - a[1]];
            let denom = c * e[1] - s * e[0];
            if denom.abs() < 1e-300 {
                continue;
            }
            let ap = [a[0] - p[0], a[1] - p[1]];
            let t = (ap[0] * e[1] - ap[1] * e[0]) / denom;
            let sp = (ap[0] * s - ap[1] * c) / denom;
            if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&sp) {
                best = best.min(t);
            }
        }
        best
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

impl Region for Polygon {
    fn dim(&self) -> usize {
        2
    }

    fn contains(&self, x: &[f64]) -> bool {
        // winding test; boundary points count as inside
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let cross = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
            let within = (x[0] - a[0]) * (x[0] - b[0]) <= 0.0 && (x[1] - a[1]) * (x[1] - b[1]) <= 0.0;
            if cross.abs() < 1e-14 && within {
                return true;
            }
            if (a[1] > x[1]) != (b[1] > x[1]) {
                let xi = a[0] + (x[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if x[0] < xi {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn interior_point(&self) -> Vec<f64> {
        // vertex average; valid for convex polygons
        let n = self.vertices.len() as f64;
        let sx: f64 = self.vertices.iter().map(|v| v[0]).sum();
        let sy: f64 = self.vertices.iter().map(|v| v[1]).sum();
        vec![sx / n, sy / n]
    }

    fn quadrature(&self, p: &[f64], kink: f64, visit: &mut dyn FnMut(&[f64], f64)) {
        let breaks = self.vertices.iter().map(|v| (v[1] - p[1]).atan2(v[0] - p[0])).collect();
        let exit = |th: f64| self.exit(p, th);
        polar_2d(p, kink, &exit, breaks, visit);
    }

    fn volume(&self) -> f64 {
        signed_area(&self.vertices)
    }
}

/// The planar domain `{c + ρ(cos φ, sin φ) : ρ ≤ R (1 + ε cos(m φ))}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedDisk {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
    pub mode: u32,
}

impl PerturbedDisk {
    pub fn new(center: [f64; 2], radius: f64, amplitude: f64, mode: u32) -> Result<Self> {
        if !(radius > 0.0) || !(amplitude.abs() < 1.0) {
            return Err(Error::Domain(format!(
                "perturbed disk needs R > 0 and |ε| < 1, got {radius} and {amplitude}"
            )));
        }
        Ok(Self { center, radius, amplitude, mode })
    }

    /// Mode-`m` perturbation with area `π`: `R = 1/√(1 + ε²/2)`.
    pub fn unit_area(amplitude: f64, mode: u32) -> Result<Self> {
        let scale = if mode == 0 { 1.0 / (1.0 + amplitude) } else { 1.0 / (1.0 + 0.5 * amplitude * amplitude).sqrt() };
        Self::new([0.0, 0.0], scale, amplitude, mode)
    }

    pub fn boundary_radius(&self, phi: f64) -> f64 {
        self.radius * (1.0 + self.amplitude * (self.mode as f64 * phi).cos())
    }

    fn level(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.center[0], y - self.center[1]);
        dx.hypot(dy) - self.boundary_radius(dy.atan2(dx))
    }

    fn exit(&self, p: &[f64], th: f64) -> f64 {
        let (s, c) = th.sin_cos();
        let h = |t: f64| self.level(p[0] + t * c, p[1] + t * s);
        let off = (p[0] - self.center[0]).hypot(p[1] - self.center[1]);
        let hi = off + self.radius * (1.0 + self.amplitude.abs()) * (1.0 + 1e-12) + 1e-12;
        crate::roots::bisect_secant(h, 0.0, hi, 1e-15).unwrap_or(hi)
    }
}

impl Region for PerturbedDisk {
    fn dim(&self) -> usize {
        2
    }

    fn contains(&self, x: &[f64]) -> bool {
        self.level(x[0], x[1]) <= 0.0
    }

    fn interior_point(&self) -> Vec<f64> {
        self.center.to_vec()
    }

    fn quadrature(&self, p: &[f64], kink: f64, visit: &mut dyn FnMut(&[f64], f64)) {
        let exit = |th: f64| self.exit(p, th);
        polar_2d(p, kink, &exit, Vec::new(), visit);
    }

    fn volume(&self) -> f64 {
        let e = self.amplitude;
        if self.mode == 0 {
            PI * (self.radius * (1.0 + e)).powi(2)
        } else {
            PI * self.radius * self.radius * (1.0 + 0.5 * e * e)
        }
    }
}
