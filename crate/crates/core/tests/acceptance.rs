//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! fails at the end if any criterion failed.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use swprofile::asymptotics::{
    ball_constant, compare_profiles, observed_order, richardson, sw_profile_spaceform, verify_ball_expansion,
    verify_ellipsoid_expansion, ExpansionOptions, VolumeGrid,
};
use swprofile::eigensolve::{center_of_mass, neumann_mu2, shoot_mu2, weinberger_bound, CenterOptions, Mesh};
use swprofile::geometry::region::{Ball, PerturbedDisk, Polygon};
use swprofile::geometry::volume::{fit_volume_coefficient, volume_expansion};
use swprofile::geometry::{CurvatureModel, MetricField, Region, SpaceForm};
use swprofile::specfun::{derived_constants, mu2_ball, BallSpectrum, IdentityChecks};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_budget = elapsed <= budget;
    let pass = out.pass && in_budget;
    println!(
        "[{}] criterion {id}: {name}: {} ({:.2}s of {:.0}s budget)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    pass
}

fn constants_table() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in 2..=12 {
        let checks = IdentityChecks::evaluate(n).unwrap();
        worst = worst.max(checks.boundary_identity_residual);
        ok &= checks.all_pass();
    }
    let g10 = derived_constants(10).unwrap().gamma;
    let g30 = derived_constants(30).unwrap().gamma;
    ok &= g30.abs() < g10.abs();
    Outcome {
        pass: ok,
        detail: format!("worst identity residual {worst:.2e}, |gamma_30| = {:.3e} < |gamma_10| = {:.3e}", g30.abs(), g10.abs()),
    }
}

fn disk_calibration() -> Outcome {
    let exact = mu2_ball(2).unwrap().mu2;
    let euclid = MetricField::euclidean(2).unwrap();
    let mut hs = Vec::new();
    let mut vals = Vec::new();
    let mut split = 0.0f64;
    let mut gap = f64::INFINITY;
    for h in [0.1, 0.05, 0.025] {
        let mesh = Mesh::unit_ball(2, h).unwrap();
        let res = neumann_mu2(&mesh, &euclid).unwrap();
        split = split.max((res.spectrum[2] - res.spectrum[1]).abs() / res.mu2);
        gap = gap.min(res.spectrum[3] / res.spectrum[2] - 1.0);
        hs.push(mesh.h());
        vals.push(res.mu2);
    }
    let extrapolated = richardson(&hs, &vals, 2.0).unwrap();
    let order = observed_order(&hs, &vals).unwrap();
    let rel = (extrapolated / exact - 1.0).abs();
    // a doubly degenerate cluster: the pair agrees, the next value is well separated
    let double = split <= 1e-6 && gap > 0.5;
    Outcome {
        pass: rel <= 1e-4 && order >= 1.8 && double,
        detail: format!("rel error {rel:.2e} (tol 1e-4), order {order:.3} (min 1.8), pair split {split:.1e}, next gap {gap:.2}"),
    }
}

fn shooting_vs_fem() -> Outcome {
    let meshes: Vec<Mesh> = [0.05, 0.025].iter().map(|&h| Mesh::unit_ball(2, h).unwrap()).collect();
    let hs: Vec<f64> = meshes.iter().map(|m| m.h()).collect();
    let mut worst = 0.0f64;
    for k in [-1.0, 0.0, 1.0] {
        for r in [0.1, 0.2, 0.3] {
            let metric = MetricField::spaceform_exact(2, k, r).unwrap();
            let vals: Vec<f64> = meshes.iter().map(|m| neumann_mu2(m, &metric).unwrap().mu2 / (r * r)).collect();
            let fem = richardson(&hs, &vals, 2.0).unwrap();
            let shot = shoot_mu2(k, 2, r).unwrap();
            worst = worst.max((fem / shot - 1.0).abs());
        }
    }
    Outcome { pass: worst <= 5e-3, detail: format!("worst relative gap {worst:.2e} (tol 5e-3)") }
}

fn product_model() -> CurvatureModel {
    CurvatureModel::product(&[(2, 1.0), (1, 0.0)])
}

fn expansion_options() -> ExpansionOptions {
    ExpansionOptions { tag: "product:S2xR".into(), ..ExpansionOptions::for_dim(3) }
}

fn ball_expansion() -> (Outcome, f64) {
    let rep = verify_ball_expansion(&product_model(), &expansion_options()).unwrap();
    let c = derived_constants(3).unwrap();
    let theory = 2.0 * c.alpha_minus;
    let out = Outcome {
        pass: rep.pass && (rep.theory - theory).abs() < 1e-14,
        detail: format!("constant {:.5} vs theory {:.5}, rel error {:.2e} (tol 5e-2)", rep.measured, rep.theory, rep.rel_error),
    };
    (out, rep.measured)
}

fn ellipsoid_expansion(ball_measured: f64) -> Outcome {
    let model = product_model();
    let rep = verify_ellipsoid_expansion(&model, &expansion_options()).unwrap();
    let c = derived_constants(3).unwrap();
    let theory = 2.0 * c.combined;
    // difference of the theoretical constants, 2α⁺(S/N − R_min)
    let gap = rep.theory - ball_constant(&model).unwrap();
    assert!((gap - 2.0 * c.alpha_plus * (model.scalar / 3.0 - model.ricci_min)).abs() < 1e-14);
    let measured_gap = rep.measured - ball_measured;
    Outcome {
        pass: rep.pass && (rep.theory - theory).abs() < 1e-14 && measured_gap >= 0.5 * gap,
        detail: format!(
            "constant {:.5} vs theory {:.5}, rel error {:.2e} (tol 5e-2); gap over ball {:.5} (need >= {:.5})",
            rep.measured,
            rep.theory,
            rep.rel_error,
            measured_gap,
            0.5 * gap
        ),
    }
}

fn profile_slopes() -> Outcome {
    let grid = VolumeGrid::default();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut slopes = Vec::new();
    for k in [1.0, -1.0] {
        let rep = sw_profile_spaceform(k, 2, &grid, 0.02).unwrap();
        ok &= rep.pass;
        slopes.push(rep.measured);
        parts.push(format!("k={k}: slope {:.5} vs {:.5} (rel {:.2e})", rep.measured, rep.theory, rep.rel_error));
    }
    let odd = (slopes[0] + slopes[1]).abs();
    Outcome { pass: ok, detail: format!("{}; tol 2e-2; slope(1) + slope(-1) = {odd:.1e}", parts.join(", ")) }
}

fn weinberger_suite() -> Outcome {
    let spec = BallSpectrum::new(2).unwrap();
    let euclid = MetricField::euclidean(2).unwrap();
    let upper = spec.mu2 * (1.0 + 2e-3);
    let side = PI.sqrt();
    let disk = PerturbedDisk::unit_area(0.1, 2).unwrap();
    let cases: Vec<(&str, Box<dyn Region>, Vec<Mesh>)> = vec![
        ("ball", Box::new(Ball::unit(2).unwrap()), vec![Mesh::disk_rings(20), Mesh::disk_rings(40)]),
        (
            "square",
            Box::new(Polygon::rectangle(side, side).unwrap()),
            vec![Mesh::rectangle(side, side, 24, 24).unwrap(), Mesh::rectangle(side, side, 48, 48).unwrap()],
        ),
        (
            "rectangle 2:1",
            Box::new(Polygon::rectangle(side * 2f64.sqrt(), side / 2f64.sqrt()).unwrap()),
            vec![
                Mesh::rectangle(side * 2f64.sqrt(), side / 2f64.sqrt(), 34, 17).unwrap(),
                Mesh::rectangle(side * 2f64.sqrt(), side / 2f64.sqrt(), 68, 34).unwrap(),
            ],
        ),
        (
            "perturbed ball",
            Box::new(disk.clone()),
            vec![Mesh::perturbed_disk(&disk, 20).unwrap(), Mesh::perturbed_disk(&disk, 40).unwrap()],
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, region, meshes) in &cases {
        let com = center_of_mass(region.as_ref(), &euclid, &spec, &CenterOptions::default()).unwrap();
        let b = weinberger_bound(region.as_ref(), &euclid, &com.point, &spec).unwrap();
        let hs: Vec<f64> = meshes.iter().map(|m| m.h()).collect();
        let vals: Vec<f64> = meshes.iter().map(|m| neumann_mu2(m, &euclid).unwrap().mu2).collect();
        let fem = richardson(&hs, &vals, 2.0).unwrap();
        // the extrapolated eigenvalue carries the 1e-4 calibration tolerance
        let above = b.bound >= fem * (1.0 - 1e-4);
        let below = b.bound <= upper;
        ok &= above && below;
        if *name == "ball" {
            let anchor = (b.bound - spec.mu2).abs() / spec.mu2;
            ok &= anchor <= 1e-6;
            parts.push(format!("ball bound {:.7} (rel {anchor:.1e} to mu2(B))", b.bound));
        } else {
            parts.push(format!("{name} fem {fem:.5} <= bound {:.5}", b.bound));
        }
    }
    Outcome { pass: ok, detail: format!("{}; upper {upper:.5}", parts.join(", ")) }
}

fn sphere_area() -> Outcome {
    let space = SpaceForm::new(2, 1.0).unwrap();
    let radii = [0.4, 0.3, 0.2, 0.15, 0.1, 0.05];
    let mut worst = 0.0f64;
    let mut ratios = Vec::new();
    for &r in &radii {
        let area = space.ball_volume(r).unwrap();
        let exact = 2.0 * PI * (1.0 - r.cos());
        worst = worst.max((area / exact - 1.0).abs());
        ratios.push(area / (PI * r * r));
    }
    let exact_fit = fit_volume_coefficient(2, 2.0, &radii, &ratios).unwrap();
    let truncated = volume_expansion(&CurvatureModel::space_form(2, 1.0), &radii).unwrap();
    let target = -1.0 / 12.0;
    let e1 = (exact_fit.coefficient / target - 1.0).abs();
    let e2 = (truncated.coefficient / target - 1.0).abs();
    Outcome {
        pass: worst <= 1e-8 && e1 <= 1e-2 && e2 <= 1e-2,
        detail: format!(
            "area rel error {worst:.1e} (tol 1e-8), r^2 coefficient {:.6} / {:.6} from exact / truncated metric (rel {e1:.1e}, {e2:.1e}; tol 1e-2)",
            exact_fit.coefficient, truncated.coefficient
        ),
    }
}

fn comparison() -> Outcome {
    let cmp = compare_profiles(0.0, 1.0, 2, &VolumeGrid::default()).unwrap();
    let min_gap = cmp.mu2_lower.iter().zip(&cmp.mu2_upper).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
    Outcome {
        pass: cmp.pass && cmp.ordered && cmp.asserted,
        detail: format!("{} volumes, smallest gap {min_gap:.3e}, violation {:?}", cmp.volumes.len(), cmp.violation),
    }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let mut results = Vec::new();
    results.push(run(1, "constant table", secs(1), constants_table));
    results.push(run(2, "disk calibration", secs(30), disk_calibration));
    results.push(run(3, "shooting vs finite elements", secs(120), shooting_vs_fem));
    let mut ball_measured = f64::NAN;
    results.push(run(4, "ball expansion constant", secs(1200), || {
        let (out, m) = ball_expansion();
        ball_measured = m;
        out
    }));
    results.push(run(5, "ellipsoid expansion constant", secs(1200), || ellipsoid_expansion(ball_measured)));
    results.push(run(6, "space-form profile slope", secs(60), profile_slopes));
    results.push(run(7, "Weinberger bound suite", secs(120), weinberger_suite));
    results.push(run(8, "sphere area expansion", secs(1), sphere_area));
    results.push(run(9, "comparison principle", secs(60), comparison));
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    assert_eq!(passed, results.len(), "some acceptance criteria failed");
}
