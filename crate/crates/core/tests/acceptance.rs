//! The eleven acceptance criteria, run in sequence by one test so that the
//! timed criteria are not measured against concurrently running work.
//!
//! Each criterion writes one `PASS` or `FAIL` line to stderr. The test fails if any
//! criterion fails.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use forchheimer::auditor::{
    max_principle_audit, sweep_environment, sweep_report, EstimateParams, SWEEP_ESTIMATES,
};
use forchheimer::constitutive::{
    eval_f, jacobian_f, jacobian_x, kernel_constants, verify_kernel_bounds, ForchheimerLaw, Inverter,
    RotationSpec, ToleranceSpec,
};
use forchheimer::field_grid::{kug_verify, ConstantField, EnvironmentParams, Grid, ScalarField, VecField};
use forchheimer::solver::{
    run, spatial_study, stable_dt, temporal_study, BoundaryPreset, InitialPreset, ProblemSpec, StepControls,
};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn unit<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// A law with `N <= 3` strictly increasing exponents in `(0, 4]`.
fn random_law<R: Rng>(rng: &mut R) -> ForchheimerLaw {
    let n = rng.random_range(1..=3usize);
    loop {
        let mut exps: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=4.0)).collect();
        exps.sort_by(f64::total_cmp);
        if exps.windows(2).any(|w| w[1] - w[0] < 1e-3) {
            continue;
        }
        let mut coeffs = vec![rng.random_range(0.1..5.0)];
        for _ in 1..n {
            coeffs.push(if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..5.0) });
        }
        coeffs.push(rng.random_range(0.1..5.0));
        return ForchheimerLaw::new(coeffs, exps).expect("generated law is valid");
    }
}

fn random_rotation<R: Rng>(rng: &mut R) -> RotationSpec {
    let k = unit(rng);
    RotationSpec::new([k.x, k.y, k.z], rng.random_range(0.0..=10.0)).expect("unit axis")
}

/// Uniform in the ball for half the draws, log-uniform magnitude otherwise.
fn random_vector<R: Rng>(rng: &mut R, radius: f64, min_norm: f64) -> Vector3<f64> {
    let d = unit(rng);
    let r = if rng.random_bool(0.5) {
        radius * rng.random::<f64>().cbrt()
    } else {
        (rng.random_range(min_norm.ln()..radius.ln())).exp()
    };
    d * r.max(min_norm)
}

/// Twenty kernel configurations: the two-term law with and without rotation,
/// then random laws and rotations.
fn kernel_configs() -> Vec<(ForchheimerLaw, RotationSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let base = ForchheimerLaw::two_term(1.0, 1.0).unwrap();
    let mut out = vec![
        (base.clone(), RotationSpec::vertical(0.0).unwrap()),
        (base.clone(), RotationSpec::vertical(1.0).unwrap()),
        (base, RotationSpec::from_direction([1.0, 1.0, 1.0], 10.0).unwrap()),
    ];
    while out.len() < 20 {
        out.push((random_law(&mut rng), random_rotation(&mut rng)));
    }
    out
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut failures = 0usize;
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let law = random_law(&mut rng);
        let rot = random_rotation(&mut rng);
        let v = random_vector(&mut rng, 1e3, 1e-9);
        let y = eval_f(&law, &rot, &v).expect("finite input");
        match Inverter::new(&law, &rot, ToleranceSpec::default()).solve(&y) {
            Ok(inv) => worst = worst.max((inv.v - v).norm() / v.norm().max(1.0)),
            Err(_) => failures += 1,
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && worst <= 1e-9 && elapsed < Duration::from_secs(10),
        format!("kernel roundtrip, 1e4 samples: worst relative error {worst:.3e}, {failures} Newton failures, {elapsed:.2?}"),
    )
}

const NORM_IDS: [&str; 8] =
    ["X0-lower", "X0-upper", "X1-lower", "X1-upper", "X2-lower", "X2-upper", "X3-lower", "X3-upper"];
const DERIVATIVE_IDS: [&str; 4] = ["Xprime-lower", "Xprime-upper", "hXh", "newpos"];

fn criterion_2() -> Outcome {
    let mut violations = 0;
    let mut checks = 0;
    let mut inversions = 0;
    for (k, (law, rot)) in kernel_configs().iter().enumerate() {
        let report = verify_kernel_bounds(law, rot, 10_000, 1e3, 100 + k as u64);
        violations += NORM_IDS.iter().map(|id| report.violations_of(id)).sum::<usize>();
        checks += NORM_IDS.iter().map(|id| report.checks_of(id)).sum::<usize>();
        inversions += report.violations_of("inversion");
    }
    let expected = 20 * 10_000 * NORM_IDS.len();
    outcome(
        violations == 0 && inversions == 0 && checks >= expected,
        format!("norm bounds X0-X3, 20 configurations x 1e4 samples: {checks} checks, {violations} violations, {inversions} failed inversions"),
    )
}

fn criterion_3() -> Outcome {
    let mut violations = 0;
    let mut ellipticity_checks = 0;
    let mut inversions = 0;
    for (k, (law, rot)) in kernel_configs().iter().enumerate() {
        let report = verify_kernel_bounds(law, rot, 1_000, 1e3, 300 + k as u64);
        violations += DERIVATIVE_IDS.iter().map(|id| report.violations_of(id)).sum::<usize>();
        ellipticity_checks += report.checks_of("hXh");
        inversions += report.violations_of("inversion");
    }
    outcome(
        violations == 0 && inversions == 0 && ellipticity_checks >= 20 * 1_000 * 16,
        format!("derivative bounds Xprime/hXh/newpos, 20 configurations x 1e3 samples x 16 directions: {ellipticity_checks} ellipticity checks, {violations} violations"),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..10_000 {
        let law = random_law(&mut rng);
        let rot = random_rotation(&mut rng);
        let v = random_vector(&mut rng, 1e3, 1e-6);
        let w = if rng.random_bool(0.5) { random_vector(&mut rng, 1e3, 1e-6) } else { v + random_vector(&mut rng, v.norm(), 1e-6) };
        let d = v - w;
        let lhs = (eval_f(&law, &rot, &v).unwrap() - eval_f(&law, &rot, &w).unwrap()).dot(&d);
        let slack = lhs - law.a0() * d.norm_squared();
        min_slack = min_slack.min(slack);
        if slack < -1e-12 {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("monotonicity on 1e4 pairs: {violations} violations, smallest slack {min_slack:.3e}"),
    )
}

fn central_difference(law: &ForchheimerLaw, rot: &RotationSpec, v: &Vector3<f64>) -> Matrix3<f64> {
    let h = 1e-6 * (1.0 + v.norm());
    let mut m = Matrix3::zeros();
    for j in 0..3 {
        let mut e = Vector3::zeros();
        e[j] = h;
        let col = (eval_f(law, rot, &(v + e)).unwrap() - eval_f(law, rot, &(v - e)).unwrap()) / (2.0 * h);
        m.set_column(j, &col);
    }
    m
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_fd = 0.0f64;
    let mut worst_inverse = 0.0f64;
    let mut errors = 0;
    for _ in 0..1_000 {
        let law = random_law(&mut rng);
        let rot = random_rotation(&mut rng);
        let v = random_vector(&mut rng, 1e3, 1e-3);
        let jf = jacobian_f(&law, &rot, &v).unwrap();
        worst_fd = worst_fd.max((central_difference(&law, &rot, &v) - jf).norm() / jf.norm());
        let y = eval_f(&law, &rot, &v).unwrap();
        match jacobian_x(&law, &rot, &y) {
            Ok(jx) => worst_inverse = worst_inverse.max((jx * jf - Matrix3::identity()).norm()),
            Err(_) => errors += 1,
        }
    }
    outcome(
        errors == 0 && worst_fd <= 1e-6 && worst_inverse <= 1e-10,
        format!("Jacobians on 1e3 samples: finite-difference mismatch {worst_fd:.3e}, |X'F' - I| {worst_inverse:.3e}, {errors} inversion errors"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let grid = Grid::unit_cube(12).unwrap();
    let mut violations = 0;
    let mut checks = 0;
    for _ in 0..10 {
        let a = kernel_constants(&random_law(&mut rng), &RotationSpec::vertical(0.0).unwrap()).a;
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        let c0 = rng.random_range(-2.0..2.0);
        let k = [rng.random_range(0.5..4.0), rng.random_range(0.5..4.0), rng.random_range(0.5..4.0)];
        let ph = [rng.random_range(0.0..6.3), rng.random_range(0.0..6.3), rng.random_range(0.0..6.3)];
        let w = ScalarField::from_fn(&grid, |x| {
            c0 + scale * ((k[0] * x.x + ph[0]).sin() + (k[1] * x.y + ph[1]).cos() * (k[2] * x.z + ph[2]).sin())
        });
        let q0 = unit(&mut rng) * 10f64.powf(rng.random_range(-2.0..2.0));
        let q1 = unit(&mut rng) * rng.random_range(0.0..1.0);
        let q = VecField::from_fn(&grid, |x| q0 + q1 * (3.0 * x.x + x.y - 2.0 * x.z).sin());
        for s in [a, 1.0, 2.0, 4.0] {
            let report = kug_verify(&grid, &w, &q, a, s, 1e-12).expect("s >= a");
            violations += report.violations.len();
            checks += report.checks.values().sum::<usize>();
        }
    }
    outcome(
        violations == 0 && checks == 10 * 4 * 3 * grid.num_cells(),
        format!("weight inequalities kug1/kug2/kugs, 10 fields x 4 orders: {checks} checks, {violations} violations"),
    )
}

fn max_principle_spec(n: usize) -> ProblemSpec {
    let grid = Grid::unit_cube(n).unwrap();
    let env = EnvironmentParams::new(1.0, 20.0, 0.0, 1.2, 0.0, RotationSpec::vertical(0.0).unwrap()).unwrap();
    let psi = BoundaryPreset::Wave { level: 1.0, amplitude: 0.5, rate: 0.0 }.build(&grid);
    let u0 = ScalarField::from_fn(&grid, |x| psi.value(x, 0.0));
    ProblemSpec {
        env,
        law: ForchheimerLaw::two_term(1.0, 1.0).unwrap(),
        u0,
        grid,
        psi,
        t_final: 0.01,
        source: None,
    }
}

fn criterion_7() -> Outcome {
    let controls = StepControls { snapshot_every: 1, ..Default::default() };
    let coarse = max_principle_spec(16);
    let fine = max_principle_spec(32);
    let dt_ratio = stable_dt(&coarse, &controls) / stable_dt(&fine, &controls);
    let v16 = max_principle_audit(&run(&coarse, &controls).unwrap(), &coarse, true).unwrap().violation;
    let v32 = max_principle_audit(&run(&fine, &controls).unwrap(), &fine, true).unwrap().violation;

    let grid = Grid::unit_cube(8).unwrap();
    let constant = ProblemSpec {
        env: EnvironmentParams::quiescent(1.0, 1.0).unwrap(),
        law: ForchheimerLaw::two_term(1.0, 1.0).unwrap(),
        u0: ScalarField::constant(&grid, 2.0),
        grid,
        psi: Arc::new(ConstantField(2.0)),
        t_final: 0.01,
        source: None,
    };
    let v_const = max_principle_audit(&run(&constant, &controls).unwrap(), &constant, true).unwrap().violation;
    outcome(
        v16 > 0.0 && v32 <= 0.65 * v16 && (dt_ratio - 4.0).abs() < 1e-9 && v_const == 0.0,
        format!("maximum principle: V16 = {v16:.4e}, V32 = {v32:.4e} (dt ratio {dt_ratio:.3}), constant case V = {v_const:e}"),
    )
}

fn reference_template(n: usize) -> ProblemSpec {
    let grid = Grid::unit_cube(n).unwrap();
    ProblemSpec {
        env: EnvironmentParams::new(1.0, 0.005, 0.0, 0.0, 0.0, RotationSpec::vertical(0.0).unwrap()).unwrap(),
        law: ForchheimerLaw::two_term(1.0, 1.0).unwrap(),
        u0: InitialPreset::Bump { level: 1.0, amplitude: 0.5 }.build(&grid, 0),
        psi: BoundaryPreset::Constant { level: 1.0 }.build(&grid),
        grid,
        t_final: 0.05,
        source: None,
    }
}

fn criterion_8() -> Outcome {
    let mut spec = reference_template(16);
    spec.env = sweep_environment(&spec, 5.0, 0.5).unwrap();
    spec.psi = BoundaryPreset::Wave { level: 1.0, amplitude: 0.2, rate: 1.0 }.build(&spec.grid);
    let controls = StepControls { snapshot_every: 50, ..Default::default() };
    let dt = stable_dt(&spec, &controls);
    spec.t_final = 500.0 * dt;
    let traj = run(&spec, &controls).unwrap();
    let worst = traj.max_balance_residual();
    let steps = traj.steps.len();
    outcome(
        steps >= 500 && traj.steps.iter().all(|s| s.balance_residual <= 1e-12),
        format!("flux balance over a {steps}-step rotating run: worst relative residual {worst:.3e}"),
    )
}

fn criterion_9() -> Outcome {
    let limit = Duration::from_secs(120);
    let start = Instant::now();
    let spatial = spatial_study("mms-trig", &[8, 16, 32], 0.005).unwrap();
    let t_spatial = start.elapsed();
    let start = Instant::now();
    let temporal = temporal_study("mms-quadratic", 8, 0.01, 3).unwrap();
    let t_temporal = start.elapsed();
    let so = spatial.orders();
    let to = temporal.orders();
    let spatial_ok = so.len() == 2 && so.iter().all(|p| (p - 2.0).abs() <= 0.3);
    let temporal_ok = !to.is_empty() && to.iter().all(|p| (p - 1.0).abs() <= 0.3);
    outcome(
        spatial_ok && temporal_ok && t_spatial < limit && t_temporal < limit,
        format!("manufactured solutions: spatial orders {so:.3?} in {t_spatial:.1?}, temporal orders {to:.3?} in {t_temporal:.1?}"),
    )
}

fn criterion_10() -> Outcome {
    let template = reference_template(16);
    let controls = StepControls { snapshot_every: 10, ..Default::default() };
    let estimates: Vec<(String, EstimateParams)> =
        SWEEP_ESTIMATES.iter().map(|id| (id.to_string(), EstimateParams::default())).collect();
    let report = sweep_report(&template, &controls, &[0.0, 1.0, 5.0, 10.0], &estimates, 0.5).unwrap();
    let finite = report.non_finite.is_empty() && report.summaries.iter().all(|s| s.all_finite);
    let worst = report.summaries.iter().map(|s| s.spread).fold(0.0, f64::max);
    let ordering: usize = report.points.iter().map(|p| p.ordering_failures.len()).sum();
    outcome(
        finite && report.summaries.len() == SWEEP_ESTIMATES.len() && worst <= 100.0 && ordering == 0,
        format!(
            "estimate sweep over Omega_star in {{0,1,5,10}}: {} estimates finite = {finite}, largest spread {worst:.3}, {ordering} ordering failures",
            report.summaries.len()
        ),
    )
}

const DETERMINISM_CONFIG: &str = r#"
seed = 7

[nondimensional]
gravity = 0.5
omega = 1.0
theta = 0.3

[rotation]
axis = [0.0, 0.0, 1.0]
rho_star = 0.5

[grid]
n = [8, 8, 8]

[data]
initial = { preset = "bump", level = 1.0, amplitude = 0.5 }
boundary = { preset = "wave", level = 1.0, amplitude = 0.2, rate = 1.0 }

[time]
t_final = 0.01
snapshot_every = 5

[sweep]
omega_star = [0.0, 1.0]

[mms]
case = "mms-trig"
grids = [4, 8]
t_final = 0.002

[kernel]
samples = 2000
"#;

fn directory_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.toml");
    std::fs::write(&cfg, DETERMINISM_CONFIG).unwrap();
    let mut mismatched = Vec::new();
    let mut failed = Vec::new();
    let mut compared = 0;
    for cmd in ["simulate", "audit", "verify-kernel", "sweep", "mms"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{cmd}-{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_forchheimer"))
                .args([cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--quiet"])
                .status()
                .expect("binary runs");
            if !status.success() {
                failed.push(cmd);
            }
            outputs.push(directory_bytes(&out));
        }
        compared += outputs[0].len();
        if outputs[0].is_empty() || outputs[0] != outputs[1] {
            mismatched.push(cmd);
        }
    }
    outcome(
        mismatched.is_empty() && failed.is_empty(),
        format!("determinism across five subcommands: {compared} files compared, mismatched {mismatched:?}, failed {failed:?}"),
    )
}

#[test]
fn primary_acceptance_criteria() {
    let criteria: [(usize, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = Vec::new();
    for (n, check) in criteria {
        let o = check();
        // Written to the raw stream so the line survives libtest output capture.
        let _ = writeln!(std::io::stderr(), "{} criterion {n}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
