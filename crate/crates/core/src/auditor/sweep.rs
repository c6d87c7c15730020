use serde::{Deserialize, Serialize};

use super::estimates::{Auditor, EstimateParams, EstimateReport};
use super::energy::energy_quantities;
use super::AuditError;
use crate::constitutive::RotationSpec;
use crate::field_grid::{box_radius, EnvironmentParams};
use crate::solver::{run, ProblemSpec, StepControls};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub omega_star: f64,
    pub omega: f64,
    pub coriolis: f64,
    pub reports: Vec<EstimateReport>,
    /// Energy orderings that failed on this run; empty when all hold.
    pub ordering_failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub estimate_id: String,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max/min` of the ratio across the sweep; one when every ratio is zero.
    pub spread: f64,
    pub all_finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rho_star: f64,
    pub points: Vec<SweepPoint>,
    pub summaries: Vec<SweepSummary>,
    /// `estimate@omega_star` labels of every non-finite ratio.
    pub non_finite: Vec<String>,
}

/// Environment of the template with `Ω = Ω₊ √(𝒢/r₀)` and `ℛ = 2ρ₊Ω/φ`.
pub fn sweep_environment(template: &ProblemSpec, omega_star: f64, rho_star: f64) -> Result<EnvironmentParams, AuditError> {
    let env = template.env;
    let r0 = box_radius(&template.grid, &env.rot);
    let omega = omega_star * (env.gravity / r0).sqrt();
    let coriolis = 2.0 * rho_star * omega / env.phi;
    let axis = env.rot.axis();
    let rot = RotationSpec::new([axis.x, axis.y, axis.z], coriolis)?;
    let mut out = EnvironmentParams::new(env.phi, env.gravity, omega, env.theta, env.omega0, rot)?;
    out.gravity_enabled = env.gravity_enabled;
    out.validate()?;
    Ok(out)
}

fn summarize(points: &[SweepPoint], estimates: &[(String, EstimateParams)]) -> (Vec<SweepSummary>, Vec<String>) {
    let mut summaries = Vec::new();
    let mut non_finite = Vec::new();
    for (k, (id, _)) in estimates.iter().enumerate() {
        let ratios: Vec<f64> = points.iter().map(|p| p.reports[k].ratio).collect();
        for (p, r) in points.iter().zip(&ratios) {
            if !r.is_finite() {
                non_finite.push(format!("{id}@{}", p.omega_star));
            }
        }
        let all_finite = ratios.iter().all(|r| r.is_finite());
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let spread = if max == 0.0 {
            1.0
        } else if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        };
        summaries.push(SweepSummary { estimate_id: id.clone(), min_ratio: min, max_ratio: max, spread, all_finite });
    }
    (summaries, non_finite)
}

/// Runs the template once per `Ω₊` value and audits the listed estimates.
/// The runs execute concurrently; the report lists them in input order.
pub fn sweep_report(
    template: &ProblemSpec,
    controls: &StepControls,
    omega_star_values: &[f64],
    estimates: &[(String, EstimateParams)],
    rho_star: f64,
) -> Result<SweepReport, AuditError> {
    if omega_star_values.len() < 2 {
        return Err(AuditError::Precondition(format!(
            "a sweep needs at least two points, got {}",
            omega_star_values.len()
        )));
    }
    if !(rho_star >= 0.0 && rho_star.is_finite()) {
        return Err(AuditError::Precondition(format!("rho_star must be >= 0, got {rho_star}")));
    }
    let results: Vec<Result<SweepPoint, AuditError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = omega_star_values
            .iter()
            .map(|&omega_star| {
                scope.spawn(move || -> Result<SweepPoint, AuditError> {
                    let env = sweep_environment(template, omega_star, rho_star)?;
                    let spec = ProblemSpec { env, ..template.clone() };
                    let traj = run(&spec, controls).map_err(|e| AuditError::Run { omega_star, message: e.to_string() })?;
                    let auditor = Auditor::new(&traj, &spec)?;
                    let reports = estimates
                        .iter()
                        .map(|(id, params)| auditor.audit(id, params))
                        .collect::<Result<Vec<_>, _>>()?;
                    let energy = energy_quantities(&traj, &spec, &[3.0, 4.0], &[], None)?;
                    Ok(SweepPoint {
                        omega_star,
                        omega: env.omega,
                        coriolis: env.rot.coriolis(),
                        reports,
                        ordering_failures: energy.ordering_failures(),
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(p) => points.push(p),
            Err(e) => {
                let (summaries, non_finite) = summarize(&points, estimates);
                return Err(AuditError::SweepAborted {
                    source: Box::new(e),
                    partial: Box::new(SweepReport { rho_star, points, summaries, non_finite }),
                });
            }
        }
    }
    let (summaries, non_finite) = summarize(&points, estimates);
    Ok(SweepReport { rho_star, points, summaries, non_finite })
}
