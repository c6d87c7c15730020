use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::constitutive::{ForchheimerLaw, RotationSpec};
use crate::field_grid::{ConstantField, EnvironmentParams, Grid, ScalarField};
use crate::solver::{run, BoundaryPreset, InitialPreset, ProblemSpec, StepControls, Trajectory};

fn law() -> ForchheimerLaw {
    ForchheimerLaw::two_term(1.0, 1.0).unwrap()
}

fn constant_spec(n: usize, c: f64, t_final: f64) -> ProblemSpec {
    let grid = Grid::unit_cube(n).unwrap();
    ProblemSpec {
        env: EnvironmentParams::quiescent(1.0, 1.0).unwrap(),
        law: law(),
        u0: ScalarField::constant(&grid, c),
        grid,
        psi: Arc::new(ConstantField(c)),
        t_final,
        source: None,
    }
}

fn generic_spec(n: usize, t_final: f64) -> ProblemSpec {
    let grid = Grid::unit_cube(n).unwrap();
    let env = EnvironmentParams::new(1.0, 0.5, 1.0, 0.3, 0.0, RotationSpec::vertical(0.5).unwrap()).unwrap();
    ProblemSpec {
        env,
        law: law(),
        u0: InitialPreset::Bump { level: 1.0, amplitude: 0.5 }.build(&grid, 0),
        psi: BoundaryPreset::Wave { level: 1.0, amplitude: 0.2, rate: 1.0 }.build(&grid),
        grid,
        t_final,
        source: None,
    }
}

fn every_step() -> StepControls {
    StepControls { snapshot_every: 1, ..Default::default() }
}

fn generic_run() -> (ProblemSpec, Trajectory) {
    let spec = generic_spec(8, 0.02);
    let traj = run(&spec, &every_step()).unwrap();
    (spec, traj)
}

#[test]
fn constant_run_has_zero_gradient_estimates_and_no_violation() {
    let spec = constant_spec(6, 2.0, 0.01);
    let traj = run(&spec, &every_step()).unwrap();
    let r = estimate_audit(&traj, &spec, "gradu6b", &EstimateParams::default()).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert_eq!(r.ratio, 0.0);
    assert!(r.rhs_data > 0.0);
    let mp = max_principle_audit(&traj, &spec, true).unwrap();
    assert_eq!(mp.violation, 0.0);
    let e = energy_quantities(&traj, &spec, &[], &[], None).unwrap();
    assert_eq!(e.m_star, 2.0);
    assert!(mp.m0_curve.iter().all(|v| v.value == 4.0));
}

#[test]
fn late_window_integral_is_bounded_by_the_full_one() {
    let (spec, traj) = generic_run();
    let auditor = Auditor::new(&traj, &spec).unwrap();
    let p = EstimateParams::default();
    let full = auditor.audit("ab23", &p).unwrap();
    let late = auditor.audit("ab24", &p).unwrap();
    assert!(late.lhs <= full.lhs && late.lhs > 0.0);
    let g6a = auditor.audit("gradu6a", &p).unwrap();
    let g6b = auditor.audit("gradu6b", &p).unwrap();
    assert!(g6a.lhs > 0.0 && g6b.lhs > 0.0 && g6a.ratio.is_finite());
}

#[test]
fn every_catalog_entry_produces_a_finite_ratio() {
    let (spec, traj) = generic_run();
    let auditor = Auditor::new(&traj, &spec).unwrap();
    for id in ESTIMATES {
        let r = auditor.audit(id, &EstimateParams::default()).unwrap();
        assert!(r.lhs >= 0.0 && r.rhs_data > 0.0 && r.ratio.is_finite(), "{id}: {r:?}");
    }
    let temporal = EstimateParams { temporal: true, ..Default::default() };
    for id in ["ab4", "iterate1", "Kug3"] {
        let r = auditor.audit(id, &temporal).unwrap();
        assert!(r.parameters.contains_key("t0"), "{id}");
        assert!(r.ratio.is_finite(), "{id}");
    }
}

#[test]
fn range_and_catalog_errors() {
    let (spec, traj) = generic_run();
    let auditor = Auditor::new(&traj, &spec).unwrap();
    let s5 = EstimateParams { s: Some(5.0), ..Default::default() };
    assert!(matches!(auditor.audit("ab23", &s5), Err(AuditError::Range { .. })));
    assert!(matches!(auditor.audit("nope", &s5), Err(AuditError::UnknownEstimate(_))));
    let s4 = EstimateParams { s: Some(4.0), ..Default::default() };
    assert!(matches!(auditor.audit("kug4", &s4), Err(AuditError::Range { .. })));
    assert!(auditor.audit("ih0", &s4).is_ok());
    let thin = EstimateParams { margin: Some(0.01), ..Default::default() };
    assert!(matches!(auditor.audit("ab23", &thin), Err(AuditError::Precondition(_))));
    let late = EstimateParams { t_start: Some(1.0), ..Default::default() };
    assert!(matches!(auditor.audit("ab24", &late), Err(AuditError::Precondition(_))));
}

#[test]
fn supremum_audits_require_dense_snapshots() {
    let spec = generic_spec(8, 0.02);
    let traj = run(&spec, &StepControls::default()).unwrap();
    assert!(traj.max_cadence() > MAX_SUP_CADENCE);
    assert!(matches!(estimate_audit(&traj, &spec, "pwt6", &EstimateParams::default()), Err(AuditError::Precondition(_))));
    assert!(estimate_audit(&traj, &spec, "ab23", &EstimateParams::default()).is_ok());
}

#[test]
fn energy_orderings_hold() {
    let (spec, traj) = generic_run();
    let c = build_cutoff(&spec.grid, 0.25, None).unwrap();
    let e = energy_quantities(&traj, &spec, &[2.5, 3.0, 6.0], &[0.0, 1.0], Some(&c)).unwrap();
    assert!(e.ordering_failures().is_empty(), "{:?}", e.ordering_failures());
    assert!(e.e_star > 0.0 && e.e0 > 0.0);
    assert_eq!(e.d_s.len(), 2);
    assert!(energy_quantities(&traj, &spec, &[], &[0.0], None).is_err());
}

#[test]
fn zero_boundary_data_collapses_the_energy() {
    let grid = Grid::unit_cube(6).unwrap();
    let u0 = InitialPreset::Bump { level: 0.0, amplitude: 0.3 }.build(&grid, 0);
    let spec = ProblemSpec {
        env: EnvironmentParams::quiescent(0.7, 1.0).unwrap(),
        law: law(),
        u0: u0.clone(),
        grid: grid.clone(),
        psi: Arc::new(ConstantField(0.0)),
        t_final: 0.01,
        source: None,
    };
    let traj = run(&spec, &every_step()).unwrap();
    let e = energy_quantities(&traj, &spec, &[], &[], None).unwrap();
    assert_eq!(e.e_star, 0.0);
    let expected = 0.7 * u0.l2_norm_squared(&grid) + 0.01;
    assert!((e.n_star - expected).abs() <= 1e-14 * expected);
}

/// `∫_0^1 f` by a 20000-point midpoint rule.
fn fine_integral(f: impl Fn(f64) -> f64) -> f64 {
    let m = 20_000;
    (0..m).map(|i| f((i as f64 + 0.5) / m as f64)).sum::<f64>() / m as f64
}

#[test]
fn initial_gradient_integral_matches_closed_form() {
    let grid = Grid::unit_cube(32).unwrap();
    let u0 = ScalarField::from_fn(&grid, |x| (PI * x.x).sin());
    let spec = ProblemSpec {
        env: EnvironmentParams::quiescent(1.0, 1.0).unwrap(),
        law: law(),
        u0,
        grid: grid.clone(),
        psi: Arc::new(ConstantField(0.0)),
        t_final: 0.0,
        source: None,
    };
    let traj = run(&spec, &StepControls::default()).unwrap();
    let c = build_cutoff(&grid, 2.0 / 32.0, None).unwrap();
    let e = energy_quantities(&traj, &spec, &[], &[0.0], Some(&c)).unwrap();
    // ζ is a product of identical axis factors, so the integral separates.
    let rho = |x: f64| c.spatial(&nalgebra::Vector3::new(x, 0.5, 0.5));
    let along = fine_integral(|x| (PI * (PI * x).cos() * rho(x)).powi(2));
    let across = fine_integral(|x| rho(x).powi(2));
    let exact = along * across * across;
    let d0 = e.d_s[0].value;
    assert!((d0 - exact).abs() < 0.01 * exact, "{d0} vs {exact}");
}

#[test]
fn negative_data_is_rejected_when_nonnegativity_is_required() {
    let mut spec = constant_spec(4, 1.0, 0.001);
    spec.u0.data[5] = -0.1;
    let traj = run(&spec, &every_step()).unwrap();
    assert!(matches!(max_principle_audit(&traj, &spec, true), Err(AuditError::Precondition(_))));
    let advisory = max_principle_audit(&traj, &spec, false).unwrap();
    assert!(!advisory.nonnegative_data);
}

#[test]
fn sweep_preconditions_and_constant_sweep() {
    let grid = Grid::unit_cube(8).unwrap();
    let env = EnvironmentParams::new(1.0, 0.005, 0.0, 0.0, 0.0, RotationSpec::vertical(0.0).unwrap()).unwrap();
    let template = ProblemSpec {
        env,
        law: law(),
        u0: ScalarField::constant(&grid, 1.0),
        grid,
        psi: Arc::new(ConstantField(1.0)),
        t_final: 0.005,
        source: None,
    };
    let ids: Vec<(String, EstimateParams)> = ["gradu6a", "ab23"].iter().map(|s| (s.to_string(), EstimateParams::default())).collect();
    assert!(matches!(
        sweep_report(&template, &every_step(), &[1.0], &ids, 0.5),
        Err(AuditError::Precondition(_))
    ));
    let r = sweep_report(&template, &every_step(), &[0.0, 1.0], &ids, 0.5).unwrap();
    assert!(r.points[0].reports.iter().all(|rep| rep.ratio == 0.0));
    assert!(r.points[1].reports.iter().all(|rep| rep.ratio.is_finite()));
    assert!(r.non_finite.is_empty());
    let env1 = sweep_environment(&template, 1.0, 0.5).unwrap();
    assert!((env1.omega - (0.005f64 / 2f64.sqrt()).sqrt()).abs() < 1e-15);
    assert!((env1.rot.coriolis() - 2.0 * 0.5 * env1.omega).abs() < 1e-15);
}

#[test]
fn cutoff_derivative_bounds() {
    let grid = Grid::unit_cube(16).unwrap();
    let c = build_cutoff(&grid, 0.25, None).unwrap();
    let analytic = c.max_partial();
    assert_eq!(analytic, 6.0);
    let on_grid = c.max_gradient_on(&grid);
    assert!(on_grid > 0.0 && on_grid <= analytic * 3f64.sqrt());
}

