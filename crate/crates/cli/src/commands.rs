use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use swprofile::asymptotics::{
    compare_profiles, sw_profile_spaceform, verify_ball_expansion, verify_ellipsoid_expansion,
    verify_ellipsoid_with_coefficients, ExpansionOptions, VerificationReport,
};
use swprofile::eigensolve::shooting::{boundary_slope, RK4_STEPS, START_FRACTION};
use swprofile::eigensolve::{neumann_mu2_with, shoot_mu2, EigOptions, EigResult, Mesh, MeshJson, Method};
use swprofile::geometry::{EllipsoidSpec, MetricField, SpaceForm};
use swprofile::specfun::{mu2_ball, ConstantsRow, IdentityChecks};

use crate::config::{
    CompareConfig, ExpansionConfig, LoadedConfig, MeshConfig, MetricConfig, ProfileConfig, RunConfig, SolveConfig,
    SolveMethod,
};
use crate::error::{CliError, EXIT_PASS, EXIT_VERIFICATION_FAILED};
use crate::output::Writer;

/// Parses `"2-12"`, `"2,3,5"`, `"2-4,7"`; the empty string gives no dimensions.
pub fn parse_dims(spec: &str) -> Result<Vec<usize>, CliError> {
    let mut dims = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parse = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| CliError::Config(format!("bad dimension '{s}' in '{spec}'")))
        };
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return Err(CliError::Config(format!("empty dimension range '{part}'")));
                }
                dims.extend(a..=b);
            }
            None => dims.push(parse(part)?),
        }
    }
    if let Some(d) = dims.iter().find(|d| !(swprofile::MIN_DIM..=swprofile::MAX_DIM).contains(*d)) {
        return Err(CliError::Config(format!(
            "dimension {d} outside [{}, {}]",
            swprofile::MIN_DIM,
            swprofile::MAX_DIM
        )));
    }
    Ok(dims)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsEntry {
    #[serde(flatten)]
    pub row: ConstantsRow,
    pub identity_residual: f64,
    pub checks_pass: bool,
}

pub fn constants_table(dims: &[usize]) -> Result<Vec<ConstantsEntry>, CliError> {
    dims.iter()
        .map(|&n| {
            let row = ConstantsRow::new(n)?;
            let checks = IdentityChecks::evaluate(n)?;
            Ok(ConstantsEntry { row, identity_residual: checks.boundary_identity_residual, checks_pass: checks.all_pass() })
        })
        .collect()
}

/// Prints the table (or JSON) and optionally writes it as CSV.
pub fn cmd_constants(dims: &[usize], json: bool, out: Option<&Path>) -> Result<i32, CliError> {
    let table = constants_table(dims)?;
    let stdout = std::io::stdout();
    let mut o = stdout.lock();
    let io = |e| CliError::io(Path::new("<stdout>"), e);
    if json {
        writeln!(o, "{}", serde_json::to_string_pretty(&table).map_err(|e| CliError::Config(e.to_string()))?)
            .map_err(io)?;
    } else {
        writeln!(
            o,
            "{:>3} {:>20} {:>14} {:>14} {:>14} {:>14} {:>10} {:>6}",
            "N", "mu2", "gamma", "alpha_minus", "alpha_plus", "nu", "identity", "checks"
        )
        .map_err(io)?;
        for e in &table {
            let r = &e.row;
            writeln!(
                o,
                "{:>3} {:>20.15} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.8} {:>10.1e} {:>6}",
                r.dim,
                r.mu2,
                r.gamma,
                r.alpha_minus,
                r.alpha_plus,
                r.nu,
                e.identity_residual,
                if e.checks_pass { "pass" } else { "FAIL" }
            )
            .map_err(io)?;
        }
    }
    if let Some(path) = out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "N", "mu2", "ball_volume", "phi1_sq", "gamma", "alpha_minus", "alpha_plus", "nu", "identity_residual",
            "checks_pass",
        ])?;
        for e in &table {
            let r = &e.row;
            let mut rec: Vec<String> = vec![r.dim.to_string()];
            rec.extend(
                [r.mu2, r.ball_volume, r.phi1_sq, r.gamma, r.alpha_minus, r.alpha_plus, r.nu, e.identity_residual]
                    .iter()
                    .map(f64::to_string),
            );
            rec.push(e.checks_pass.to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(if table.iter().all(|e| e.checks_pass) { EXIT_PASS } else { EXIT_VERIFICATION_FAILED })
}

pub fn cmd_mu2_ball(dim: usize, json: bool) -> Result<i32, CliError> {
    let spec = mu2_ball(dim)?;
    if json {
        println!("{}", serde_json::json!({ "N": dim, "mu2": spec.mu2 }));
    } else {
        println!("{:.16}", spec.mu2);
    }
    Ok(EXIT_PASS)
}

/// Runs a configuration file for the subcommand `expected`.
pub fn cmd_config(expected: &str, path: &Path) -> Result<i32, CliError> {
    let loaded = LoadedConfig::from_path(path)?;
    if loaded.config.command() != expected {
        return Err(CliError::Config(format!(
            "config is for '{}', not '{expected}'",
            loaded.config.command()
        )));
    }
    run_config(&loaded)
}

pub fn run_config(loaded: &LoadedConfig) -> Result<i32, CliError> {
    let cfg = &loaded.config;
    let out = cfg.output();
    let stem = out.stem.clone().unwrap_or_else(|| cfg.command().to_string());
    let mut writer = Writer::new(&out.dir, &stem, cfg.command(), &loaded.hash)?;
    let code = match cfg {
        RunConfig::Solve(c) => {
            let result = solve(c)?;
            println!("mu2 = {:.12}", result.mu2);
            writer.json(&result)?;
            EXIT_PASS
        }
        RunConfig::VerifyBall(c) => {
            let report = verify_ball_expansion(&c.model.model()?, &expansion_options(c))?;
            write_report(&mut writer, &report)?
        }
        RunConfig::VerifyEllipsoid(c) => {
            let model = c.model.model()?;
            let opts = expansion_options(c);
            let report = match &c.eccentricity {
                Some(b) => verify_ellipsoid_with_coefficients(&model, b, &opts)?,
                None => verify_ellipsoid_expansion(&model, &opts)?,
            };
            write_report(&mut writer, &report)?
        }
        RunConfig::Profile(c) => profile(&mut writer, c)?,
        RunConfig::Compare(c) => compare(&mut writer, c)?,
    };
    writer.manifest(code)?;
    Ok(code)
}

fn expansion_options(c: &ExpansionConfig) -> ExpansionOptions {
    let mut opts = ExpansionOptions::for_dim(c.dim);
    if let Some(h) = &c.mesh_sizes {
        opts.mesh_sizes = h.clone();
    }
    opts.radii = c.radii.clone();
    opts.tolerance = c.tolerance;
    opts.abs_tolerance = c.abs_tolerance;
    opts.eig.subspace.seed = c.seed;
    opts.tag = c.model.tag();
    opts
}

fn write_report(writer: &mut Writer, report: &VerificationReport) -> Result<i32, CliError> {
    writer.json(report)?;
    writer.samples(&report.samples)?;
    summary(report);
    Ok(if report.pass || !report.asserted { EXIT_PASS } else { EXIT_VERIFICATION_FAILED })
}

fn summary(report: &VerificationReport) {
    let status = match (report.asserted, report.pass) {
        (false, _) => "REPORTED",
        (true, true) => "PASS",
        (true, false) => "FAIL",
    };
    println!(
        "{status} {}: measured {:.6} theory {:.6} error {:.3e} ({:?} tolerance {:.1e})",
        report.check, report.measured, report.theory, report.rel_error, report.tolerance_kind, report.tolerance
    );
}

fn profile(writer: &mut Writer, c: &ProfileConfig) -> Result<i32, CliError> {
    let report = sw_profile_spaceform(c.k, c.dim, &c.volume_grid, c.tolerance)?;
    write_report(writer, &report)
}

fn compare(writer: &mut Writer, c: &CompareConfig) -> Result<i32, CliError> {
    let cmp = compare_profiles(c.k_lower, c.k_upper, c.dim, &c.volume_grid)?;
    writer.json(&cmp)?;
    match (cmp.asserted, cmp.violation) {
        (false, _) => println!("REPORTED compare: equal curvatures, no ordering expected"),
        (true, None) => println!("PASS compare: strict ordering at all {} volumes", cmp.volumes.len()),
        (true, Some(v)) => println!("FAIL compare: ordering violated at volume {v:e}"),
    }
    Ok(if cmp.pass { EXIT_PASS } else { EXIT_VERIFICATION_FAILED })
}

fn load_mesh(dim: usize, mesh: &MeshConfig) -> Result<Mesh, CliError> {
    let built = match (&mesh.h, &mesh.file) {
        (Some(h), _) => Mesh::unit_ball(dim, *h),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read mesh {}: {e}", path.display())))?;
            let json: MeshJson = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("malformed mesh {}: {e}", path.display())))?;
            Mesh::from_json(&json)
        }
        (None, None) => return Err(CliError::Config("mesh needs either a size h or a file".into())),
    };
    let mesh = built.map_err(|e| CliError::Config(e.to_string()))?;
    if mesh.dim() != dim {
        return Err(CliError::Config(format!("mesh dimension {} does not match dim {dim}", mesh.dim())));
    }
    Ok(mesh)
}

fn build_metric(dim: usize, metric: &MetricConfig) -> Result<MetricField, CliError> {
    Ok(match metric {
        MetricConfig::Euclidean => MetricField::euclidean(dim)?,
        MetricConfig::BallExpansion { model, r } => MetricField::ball_expansion(&model.model()?, *r)?,
        MetricConfig::Ellipsoid { model, r, b } => {
            let model = model.model()?;
            let spec = match b {
                Some(b) => EllipsoidSpec::with_coefficients(&model, *r, b.clone())?,
                None => EllipsoidSpec::optimal(&model, *r)?,
            };
            MetricField::ellipsoid_pullback(&spec)?
        }
        MetricConfig::SpaceformExact { k, r } => MetricField::spaceform_exact(dim, *k, *r)?,
    })
}

pub fn solve(c: &SolveConfig) -> Result<EigResult, CliError> {
    match c.method {
        SolveMethod::Fem => {
            let mesh_cfg = c.mesh.as_ref().ok_or_else(|| CliError::Config("missing mesh section".into()))?;
            let mesh = load_mesh(c.dim, mesh_cfg)?;
            let metric = build_metric(c.dim, &c.metric)?;
            let mut opts = EigOptions::default();
            opts.subspace.seed = c.seed;
            Ok(neumann_mu2_with(&mesh, &metric, &opts)?)
        }
        SolveMethod::Shooting => {
            let MetricConfig::SpaceformExact { k, r } = c.metric else {
                return Err(CliError::Config("shooting needs a spaceform_exact metric".into()));
            };
            let mu2 = shoot_mu2(k, c.dim, r)?;
            let slope = boundary_slope(&SpaceForm::new(c.dim, k)?, r, mu2);
            let step = (r - r / START_FRACTION) / RK4_STEPS as f64;
            Ok(EigResult {
                mu2,
                eigvec: Vec::new(),
                residual: slope.abs(),
                mean_violation: 0.0,
                mesh_h: step,
                mesh_h_max: step,
                n_dofs: RK4_STEPS,
                method: Method::Shooting,
                solver: "shooting-rk4".to_string(),
                spectrum: vec![mu2],
                iterations: 0,
            })
        }
    }
}
