//! Report types shared by the verification runs.

use serde::{Deserialize, Serialize};

use super::fit::ExpansionFit;

/// How a measured value is compared with its theoretical counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceKind {
    Relative,
    Absolute,
}

/// One row of the sample CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    /// Geodesic radius.
    pub r: f64,
    /// Mesh size; empty for shooting.
    pub h: Option<f64>,
    /// Eigenvalue of the geodesic ball at this resolution.
    pub mu2_raw: f64,
    /// Eigenvalue after extrapolation in `h` (equal to `mu2_raw` for shooting).
    pub mu2_extrapolated: f64,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// `"fem-p1"` or `"shooting-rk4"`.
    pub solver: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mesh_sizes: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dofs: Vec<usize>,
    /// Radii or volumes sampled.
    pub grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolation_order: Option<f64>,
    /// Convergence order observed on the finest three levels, per grid point.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observed_orders: Vec<Option<f64>>,
    pub fit_model: String,
    pub version: String,
}

/// A profile point: geodesic ball of volume `volume` and radius `radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub volume: f64,
    /// `(volume/|B|)^{2/N}`.
    pub s: f64,
    pub radius: f64,
    pub mu2: f64,
    /// `μ₂ / ((|B|/volume)^{2/N} μ₂(B))`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub theory: f64,
    pub measured: f64,
    /// `|measured − theory| / |theory|`, or the absolute error when the
    /// tolerance is absolute.
    pub rel_error: f64,
    pub tolerance: f64,
    pub tolerance_kind: ToleranceKind,
    pub pass: bool,
    /// False for runs that are reported but not held to the tolerance.
    pub asserted: bool,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<ExpansionFit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<ProfilePoint>,
    #[serde(default)]
    pub samples: Vec<SampleRow>,
}

impl VerificationReport {
    /// Compares `measured` with `theory`: relatively when `theory ≠ 0`,
    /// otherwise against `abs_tolerance`.
    pub(crate) fn compare(
        check: &str,
        theory: f64,
        measured: f64,
        tolerance: f64,
        abs_tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        let (err, tol, kind) = if theory != 0.0 {
            ((measured - theory).abs() / theory.abs(), tolerance, ToleranceKind::Relative)
        } else {
            ((measured - theory).abs(), abs_tolerance, ToleranceKind::Absolute)
        };
        Self {
            check: check.to_string(),
            theory,
            measured,
            rel_error: err,
            tolerance: tol,
            tolerance_kind: kind,
            pass: err <= tol,
            asserted: true,
            provenance,
            fit: None,
            profile: Vec::new(),
            samples: Vec::new(),
        }
    }
}

pub(crate) fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}
