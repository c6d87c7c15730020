use std::path::Path;

use serde::Serialize;

use super::config::{RunConfig, StudyKind};
use super::io::{snapshot_csv, write_json};
use super::{Cli, CliError, Command, EXIT_VIOLATIONS};
use crate::auditor::{
    build_cutoff, energy_quantities, max_principle_audit, sweep_report, Auditor, EnergyQuantities, EstimateReport,
    MaxPrincipleReport, SweepReport,
};
use crate::constitutive::{kernel_constants, verify_kernel_bounds, BoundReport, ForchheimerLaw, KernelConstants, RotationSpec};
use crate::solver::{run, spatial_study, stable_dt, temporal_study, ConvergenceTable, SolverError, Trajectory};

pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
}

#[derive(Serialize)]
struct SnapshotEntry {
    file: String,
    step: usize,
    t: f64,
}

#[derive(Serialize)]
struct Manifest {
    command: &'static str,
    seed: u64,
    cells: [usize; 3],
    t_final: f64,
    dt: f64,
    steps: usize,
    snapshots: Vec<SnapshotEntry>,
    kernel_failures: usize,
    newton_iterations: usize,
    continuations: usize,
    max_flux_residual: f64,
    max_balance_residual: f64,
}

#[derive(Serialize)]
struct AuditDocument {
    command: &'static str,
    seed: u64,
    chi_star: f64,
    sampled_m_z: f64,
    estimates: Vec<EstimateReport>,
    energy: EnergyQuantities,
    ordering_failures: Vec<String>,
    max_principle: Option<MaxPrincipleReport>,
}

#[derive(Serialize)]
struct KernelDocument {
    command: &'static str,
    seed: u64,
    samples: usize,
    radius: f64,
    law: ForchheimerLaw,
    rotation: RotationSpec,
    constants: KernelConstants,
    report: BoundReport,
}

#[derive(Serialize)]
struct SweepDocument {
    command: &'static str,
    seed: u64,
    report: SweepReport,
}

#[derive(Serialize)]
struct MmsDocument {
    command: &'static str,
    table: ConvergenceTable,
}

fn config_for(cli: &Cli, optional: bool) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None if optional => RunConfig::from_toml_str("[nondimensional]\n")?,
        None => return Err(CliError::Config(format!("{} needs --config", cli.command.name()))),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
        cfg.raw.seed = s;
    }
    Ok(cfg)
}

fn estimate_ids(cli: &Cli, cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let ids = cli.estimates.clone().unwrap_or_else(|| cfg.raw.audit.estimates.clone());
    for id in &ids {
        if !crate::auditor::ESTIMATES.contains(&id.as_str()) {
            return Err(CliError::Config(format!("--estimates: unknown estimate '{id}'")));
        }
    }
    Ok(ids)
}

fn simulate_trajectory(cfg: &RunConfig) -> Result<Trajectory, CliError> {
    Ok(run(&cfg.problem(), &cfg.controls)?)
}

/// Runs the selected subcommand and writes its artifacts into `cli.out`.
pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let out = cli.out.as_path();
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("cannot create {}: {e}", out.display())))?;
    match cli.command {
        Command::Simulate => simulate(&config_for(cli, false)?, out),
        Command::Audit => audit(cli, &config_for(cli, false)?, out),
        Command::VerifyKernel => verify(cli, &config_for(cli, true)?, out),
        Command::Sweep => sweep(cli, &config_for(cli, false)?, out),
        Command::Mms => mms(&config_for(cli, true)?, out),
    }
}

fn simulate(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let spec = cfg.problem();
    let traj = simulate_trajectory(cfg)?;
    let mut snapshots = Vec::with_capacity(traj.snapshots.len());
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let file = format!("snapshot_{k:05}.csv");
        std::fs::write(out.join(&file), snapshot_csv(&spec.grid, snap))
            .map_err(|e| CliError::Io(format!("cannot write {file}: {e}")))?;
        snapshots.push(SnapshotEntry { file, step: snap.step, t: snap.t });
    }
    let manifest = Manifest {
        command: "simulate",
        seed: cfg.seed,
        cells: spec.grid.n(),
        t_final: spec.t_final,
        dt: stable_dt(&spec, &cfg.controls),
        steps: traj.steps.len(),
        snapshots,
        kernel_failures: 0,
        newton_iterations: traj.steps.iter().map(|s| s.newton_iterations).sum(),
        continuations: traj.steps.iter().map(|s| s.continuations).sum(),
        max_flux_residual: traj.steps.iter().fold(0.0, |m, s| m.max(s.max_residual)),
        max_balance_residual: traj.max_balance_residual(),
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(Outcome {
        exit_code: 0,
        summary: format!("simulate: {} steps, {} snapshots written to {}", manifest.steps, manifest.snapshots.len(), out.display()),
    })
}

fn audit(cli: &Cli, cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let spec = cfg.problem();
    let traj = simulate_trajectory(cfg)?;
    let ids = estimate_ids(cli, cfg)?;
    let auditor = Auditor::new(&traj, &spec)?;
    let estimates = ids
        .iter()
        .map(|id| auditor.audit(id, &cfg.raw.audit.params_for(id)))
        .collect::<Result<Vec<_>, _>>()?;
    let margin = cfg.raw.audit.margin.unwrap_or(2.0 * spec.grid.max_dx());
    // Grids too coarse for a cutoff report the data functionals without D_s.
    let cutoff = build_cutoff(&spec.grid, margin, None).ok();
    let d_list: &[f64] = if cutoff.is_some() { &[0.0, 1.0] } else { &[] };
    let energy = energy_quantities(&traj, &spec, &[3.0, 4.0], d_list, cutoff.as_ref())?;
    let max_principle = if cfg.raw.audit.max_principle {
        Some(max_principle_audit(&traj, &spec, cfg.raw.audit.require_nonnegative)?)
    } else {
        None
    };
    let doc = AuditDocument {
        command: "audit",
        seed: cfg.seed,
        chi_star: auditor.chi_star(),
        sampled_m_z: auditor.m_z(),
        ordering_failures: energy.ordering_failures(),
        estimates,
        energy,
        max_principle,
    };
    write_json(&out.join("audit_report.json"), &doc)?;
    Ok(Outcome { exit_code: 0, summary: format!("audit: {} estimates audited", doc.estimates.len()) })
}

fn verify(cli: &Cli, cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let samples = cli.samples.unwrap_or(cfg.raw.kernel.samples);
    if samples == 0 {
        return Err(CliError::Config("--samples must be positive".into()));
    }
    let radius = cfg.raw.kernel.radius;
    let report = verify_kernel_bounds(&cfg.law, &cfg.env.rot, samples, radius, cfg.seed);
    let clean = report.is_clean();
    let violations = report.violations.len();
    let doc = KernelDocument {
        command: "verify-kernel",
        seed: cfg.seed,
        samples,
        radius,
        law: cfg.law.clone(),
        rotation: cfg.env.rot,
        constants: kernel_constants(&cfg.law, &cfg.env.rot),
        report,
    };
    write_json(&out.join("kernel_report.json"), &doc)?;
    Ok(Outcome {
        exit_code: if clean { 0 } else { EXIT_VIOLATIONS },
        summary: format!("verify-kernel: {samples} samples, {violations} violations"),
    })
}

fn sweep(cli: &Cli, cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let spec = cfg.problem();
    let ids = estimate_ids(cli, cfg)?;
    let estimates: Vec<_> = ids.iter().map(|id| (id.clone(), cfg.raw.audit.params_for(id))).collect();
    let report = sweep_report(&spec, &cfg.controls, &cfg.raw.sweep.omega_star, &estimates, cfg.sweep_rho_star)?;
    let worst = report.summaries.iter().map(|s| s.spread).fold(1.0, f64::max);
    let summary = format!("sweep: {} points, largest ratio spread {worst:e}", report.points.len());
    write_json(&out.join("sweep_report.json"), &SweepDocument { command: "sweep", seed: cfg.seed, report })?;
    Ok(Outcome { exit_code: 0, summary })
}

fn mms(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let m = &cfg.raw.mms;
    let table = match m.kind {
        StudyKind::Spatial => spatial_study(&m.case, &m.grids, m.t_final),
        StudyKind::Temporal => temporal_study(&m.case, m.n, m.t_final, m.levels),
    }
    .map_err(|e: SolverError| CliError::from(e))?;
    let orders = table.orders();
    write_json(&out.join("mms_report.json"), &MmsDocument { command: "mms", table })?;
    Ok(Outcome { exit_code: 0, summary: format!("mms: observed orders {orders:?}") })
}
