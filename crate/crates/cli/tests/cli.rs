use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_swprofile"));
    c.env_remove("SWPROFILE_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, body: Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path
}

fn run_config(sub: &str, path: &Path) -> Output {
    run(&[sub, "--config", path.to_str().unwrap()])
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn constants_table_rows_and_empty_table() {
    let o = run(&["constants", "--dims", "2-12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 12);
    assert_eq!(text.matches(" pass").count(), 11);

    let o = run(&["constants", "--dims", "2", "--json"]);
    let rows: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rows[0]["gamma"].as_f64().unwrap() < 0.0);
    assert_eq!(rows[0]["N"], 2);

    let o = run(&["constants", "--dims", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    assert_eq!(run(&["constants", "--dims", "1-4"]).status.code(), Some(2));
}

#[test]
fn constants_csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let o = run(&["constants", "--dims", "2,3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("N,mu2,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn mu2_ball_value() {
    let o = run(&["mu2-ball", "--dim", "2"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 3.389957716671889).abs() < 1e-12);
    assert_eq!(run(&["mu2-ball", "--dim", "51"]).status.code(), Some(3));
}

#[test]
fn solve_fem_disk_and_shooting() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "fem.json",
        serde_json::json!({
            "command": "solve", "dim": 2, "method": "fem",
            "metric": {"kind": "euclidean"}, "mesh": {"h": 0.05},
            "output": {"dir": dir.path().join("out"), "stem": "disk"}
        }),
    );
    let o = run_config("solve", &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&dir.path().join("out/disk.json"));
    let mu2 = doc["result"]["mu2"].as_f64().unwrap();
    assert!((mu2 - 3.3900).abs() < 1e-2);
    assert_eq!(doc["result"]["method"], "fem");
    assert_eq!(doc["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));

    let cfg = write_config(
        dir.path(),
        "shoot.json",
        serde_json::json!({
            "command": "solve", "dim": 2, "method": "shooting",
            "metric": {"kind": "spaceform_exact", "k": 1.0, "r": 0.2},
            "output": {"dir": dir.path().join("out"), "stem": "shoot"}
        }),
    );
    let o = run_config("solve", &cfg);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("mu2 = "));
    let doc = read_json(&dir.path().join("out/shoot.json"));
    let mu2 = doc["result"]["mu2"].as_f64().unwrap();
    assert!((mu2 * 0.04 / 3.3899577 - 1.0).abs() < 0.01);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"command\": ").unwrap();
    assert_eq!(run_config("verify-ball", &bad).status.code(), Some(2));

    let no_mesh = write_config(
        dir.path(),
        "nomesh.json",
        serde_json::json!({
            "command": "solve", "dim": 2, "method": "fem",
            "metric": {"kind": "euclidean"}, "output": {"dir": dir.path()}
        }),
    );
    assert_eq!(run_config("solve", &no_mesh).status.code(), Some(2));
    // a valid config handed to the wrong subcommand
    assert_eq!(run_config("compare", &no_mesh).status.code(), Some(2));
    assert_eq!(run_config("solve", &dir.path().join("missing.json")).status.code(), Some(2));
}

#[test]
fn solver_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "big.json",
        serde_json::json!({
            "command": "solve", "dim": 2, "method": "fem",
            "metric": {"kind": "ball_expansion", "model": {"kind": "spaceform", "dim": 2, "k": 1.0}, "r": 2.5},
            "mesh": {"h": 0.1}, "output": {"dir": dir.path()}
        }),
    );
    let o = run_config("solve", &cfg);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("solver error"));
}

fn zero_curvature_config(dir: &Path) -> PathBuf {
    write_config(
        dir,
        "flat.json",
        serde_json::json!({
            "command": "verify-ball", "dim": 2,
            "model": {"kind": "spaceform", "dim": 2, "k": 0.0},
            "mesh_sizes": [0.25, 0.125],
            "output": {"dir": dir.join("out"), "stem": "flat"}
        }),
    )
}

#[test]
fn verify_ball_zero_curvature_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = zero_curvature_config(dir.path());
    let o = run_config("verify-ball", &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("PASS"));
    let out = dir.path().join("out");
    let report = read_json(&out.join("flat.json"));
    assert!(report["result"]["measured"].as_f64().unwrap().abs() < 1e-2);
    let csv1 = std::fs::read(out.join("flat.csv")).unwrap();
    let json1 = std::fs::read(out.join("flat.json")).unwrap();
    let text = String::from_utf8(csv1.clone()).unwrap();
    let mut lines = text.lines();
    let hash = report["config_hash"].as_str().unwrap();
    assert!(lines.next().unwrap().contains(hash));
    assert_eq!(lines.next().unwrap(), "r,h,mu2_raw,mu2_extrapolated,model");
    assert_eq!(lines.count(), 10);
    let manifest = read_json(&out.join("flat.manifest.json"));
    assert_eq!(manifest["exit_code"], 0);
    assert!(manifest["timestamp"].as_u64().unwrap() > 0);

    let o = bin().env("SWPROFILE_WORKERS", "1").args(["verify-ball", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(out.join("flat.csv")).unwrap(), csv1);
    assert_eq!(std::fs::read(out.join("flat.json")).unwrap(), json1);
}

#[test]
fn invalid_worker_count_is_a_config_error() {
    let o = bin().env("SWPROFILE_WORKERS", "zero").args(["mu2-ball", "--dim", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_ellipsoid_product_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "ell.json",
        serde_json::json!({
            "command": "verify-ellipsoid", "dim": 3,
            "model": {"kind": "product", "dim": 3, "blocks": [{"dim": 2, "k": 1.0}, {"dim": 1, "k": 0.0}]},
            "mesh_sizes": [0.25, 0.1666666666666667],
            "output": {"dir": dir.path()}
        }),
    );
    let o = run_config("verify-ellipsoid", &cfg);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&dir.path().join("verify-ellipsoid.json"));
    assert!(doc["result"]["rel_error"].as_f64().unwrap() <= 0.05);
}

#[test]
fn non_optimal_ellipsoid_is_reported_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "shape.json",
        serde_json::json!({
            "command": "verify-ellipsoid", "dim": 2,
            "model": {"kind": "spaceform", "dim": 2, "k": 0.0},
            "eccentricity": [1.0, -1.0],
            "mesh_sizes": [0.25, 0.125],
            "output": {"dir": dir.path()}
        }),
    );
    let o = run_config("verify-ellipsoid", &cfg);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("REPORTED"));
}

#[test]
fn profile_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.json",
        serde_json::json!({"command": "sw-profile", "dim": 2, "k": 1.0, "output": {"dir": dir.path()}}),
    );
    assert_eq!(run_config("sw-profile", &cfg).status.code(), Some(0));
    let doc = read_json(&dir.path().join("sw-profile.json"));
    assert_eq!(doc["result"]["profile"].as_array().unwrap().len(), 8);

    let strict = write_config(
        dir.path(),
        "strict.json",
        serde_json::json!({"command": "sw-profile", "dim": 2, "k": 1.0, "tolerance": 1e-9, "output": {"dir": dir.path()}}),
    );
    assert_eq!(run_config("sw-profile", &strict).status.code(), Some(1));

    let cmp = write_config(
        dir.path(),
        "c.json",
        serde_json::json!({"command": "compare", "dim": 2, "k_lower": 0.0, "k_upper": 1.0, "output": {"dir": dir.path()}}),
    );
    let o = run_config("compare", &cmp);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS"));
}
