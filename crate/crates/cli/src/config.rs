//! JSON run configurations. Every field not listed here is rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use swprofile::asymptotics::VolumeGrid;
use swprofile::geometry::CurvatureDescriptor;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// File stem; defaults to the command name.
    #[serde(default)]
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", deny_unknown_fields)]
pub enum RunConfig {
    #[serde(rename = "solve")]
    Solve(SolveConfig),
    #[serde(rename = "verify-ball")]
    VerifyBall(ExpansionConfig),
    #[serde(rename = "verify-ellipsoid")]
    VerifyEllipsoid(ExpansionConfig),
    #[serde(rename = "sw-profile")]
    Profile(ProfileConfig),
    #[serde(rename = "compare")]
    Compare(CompareConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Fem,
    Shooting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricConfig {
    Euclidean,
    BallExpansion { model: CurvatureDescriptor, r: f64 },
    /// `b` defaults to the optimal eccentricity coefficients.
    Ellipsoid {
        model: CurvatureDescriptor,
        r: f64,
        #[serde(default)]
        b: Option<Vec<f64>>,
    },
    SpaceformExact { k: f64, r: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    /// Target size of the built-in disk/ball mesh.
    #[serde(default)]
    pub h: Option<f64>,
    /// JSON mesh file (`{dim, vertices, cells, h?}`).
    #[serde(default)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub dim: usize,
    pub method: SolveMethod,
    pub metric: MetricConfig,
    #[serde(default)]
    pub mesh: Option<MeshConfig>,
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionConfig {
    pub dim: usize,
    pub model: CurvatureDescriptor,
    /// Geodesic radii, strictly decreasing.
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    /// Mesh sizes, strictly decreasing; defaults depend on the dimension.
    #[serde(default)]
    pub mesh_sizes: Option<Vec<f64>>,
    #[serde(default = "default_fem_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_abs_tolerance")]
    pub abs_tolerance: f64,
    /// Non-optimal eccentricity coefficients (ellipsoid runs only).
    #[serde(default)]
    pub eccentricity: Option<Vec<f64>>,
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub dim: usize,
    pub k: f64,
    #[serde(default)]
    pub volume_grid: VolumeGrid,
    #[serde(default = "default_shooting_tolerance")]
    pub tolerance: f64,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub dim: usize,
    pub k_lower: f64,
    pub k_upper: f64,
    #[serde(default)]
    pub volume_grid: VolumeGrid,
    pub output: OutputConfig,
}

fn default_radii() -> Vec<f64> {
    vec![0.4, 0.3, 0.2, 0.15, 0.1]
}

fn default_fem_tolerance() -> f64 {
    0.05
}

fn default_abs_tolerance() -> f64 {
    1e-2
}

fn default_shooting_tolerance() -> f64 {
    0.02
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_dim(dim: usize, lo: usize, hi: usize) -> Result<(), CliError> {
    if !(lo..=hi).contains(&dim) {
        return Err(bad(format!("dimension {dim} outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_decreasing(name: &str, v: &[f64]) -> Result<(), CliError> {
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) || v.windows(2).any(|w| w[1] >= w[0]) {
        return Err(bad(format!("{name} must be positive and strictly decreasing, got {v:?}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(bad(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn check_model(dim: usize, model: &CurvatureDescriptor) -> Result<(), CliError> {
    if model.dim() != dim {
        return Err(bad(format!("model dimension {} does not match dim {dim}", model.dim())));
    }
    model.model().map(|_| ()).map_err(|e| bad(format!("invalid curvature model: {e}")))
}

fn check_grid(grid: &VolumeGrid) -> Result<(), CliError> {
    grid.fractions().map(|_| ()).map_err(|e| bad(e.to_string()))
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::Solve(_) => "solve",
            RunConfig::VerifyBall(_) => "verify-ball",
            RunConfig::VerifyEllipsoid(_) => "verify-ellipsoid",
            RunConfig::Profile(_) => "sw-profile",
            RunConfig::Compare(_) => "compare",
        }
    }

    pub fn output(&self) -> &OutputConfig {
        match self {
            RunConfig::Solve(c) => &c.output,
            RunConfig::VerifyBall(c) | RunConfig::VerifyEllipsoid(c) => &c.output,
            RunConfig::Profile(c) => &c.output,
            RunConfig::Compare(c) => &c.output,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            RunConfig::Solve(c) => {
                match c.method {
                    SolveMethod::Fem => {
                        check_dim(c.dim, 2, 3)?;
                        let mesh = c.mesh.as_ref().ok_or_else(|| bad("finite-element solve needs a mesh section"))?;
                        match (mesh.h, &mesh.file) {
                            (Some(h), None) => check_positive("mesh.h", h)?,
                            (None, Some(_)) => {}
                            (None, None) => return Err(bad("mesh needs either a size h or a file")),
                            (Some(_), Some(_)) => return Err(bad("mesh takes a size h or a file, not both")),
                        }
                    }
                    SolveMethod::Shooting => {
                        check_dim(c.dim, swprofile::MIN_DIM, swprofile::MAX_DIM)?;
                        if !matches!(c.metric, MetricConfig::SpaceformExact { .. }) {
                            return Err(bad("shooting needs a spaceform_exact metric"));
                        }
                    }
                }
                match &c.metric {
                    MetricConfig::Euclidean => Ok(()),
                    MetricConfig::BallExpansion { model, r } | MetricConfig::Ellipsoid { model, r, .. } => {
                        check_positive("metric.r", *r)?;
                        check_model(c.dim, model)
                    }
                    MetricConfig::SpaceformExact { k, r } => {
                        check_positive("metric.r", *r)?;
                        if !k.is_finite() {
                            return Err(bad("metric.k must be finite"));
                        }
                        Ok(())
                    }
                }
            }
            RunConfig::VerifyBall(c) | RunConfig::VerifyEllipsoid(c) => {
                check_dim(c.dim, 2, 3)?;
                check_model(c.dim, &c.model)?;
                check_decreasing("radii", &c.radii)?;
                if let Some(h) = &c.mesh_sizes {
                    check_decreasing("mesh_sizes", h)?;
                }
                check_positive("tolerance", c.tolerance)?;
                check_positive("abs_tolerance", c.abs_tolerance)?;
                if c.eccentricity.is_some() && matches!(self, RunConfig::VerifyBall(_)) {
                    return Err(bad("eccentricity applies to ellipsoid runs only"));
                }
                Ok(())
            }
            RunConfig::Profile(c) => {
                check_dim(c.dim, swprofile::MIN_DIM, swprofile::MAX_DIM)?;
                check_positive("tolerance", c.tolerance)?;
                check_grid(&c.volume_grid)
            }
            RunConfig::Compare(c) => {
                check_dim(c.dim, swprofile::MIN_DIM, swprofile::MAX_DIM)?;
                if !(c.k_lower <= c.k_upper) {
                    return Err(bad(format!("k_lower {} must not exceed k_upper {}", c.k_lower, c.k_upper)));
                }
                check_grid(&c.volume_grid)
            }
        }
    }
}

/// A parsed configuration and the hash of its canonical form.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub hash: String,
}

impl LoadedConfig {
    pub fn from_str(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(format!("malformed JSON: {e}")))?;
        // object keys are sorted, so the hash ignores formatting and key order
        let canonical = serde_json::to_vec(&value).map_err(|e| bad(e.to_string()))?;
        let config: RunConfig = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
        config.validate()?;
        Ok(Self { config, hash: hex::encode(Sha256::digest(&canonical)) })
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_str(&text)
    }
}
