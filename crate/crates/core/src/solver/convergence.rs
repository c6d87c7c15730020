//! Observed orders of accuracy for the manufactured cases.

use serde::{Deserialize, Serialize};

use super::{manufactured_case, run, stable_dt, SolverError, StepControls};
use crate::field_grid::{Grid, ScalarField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub cells_per_axis: usize,
    pub dt: f64,
    pub steps: usize,
    /// Discrete `L²` error against the reference (the exact solution for a
    /// spatial study, the next finer time step for a temporal study).
    pub error: f64,
    /// `log2` of the error ratio to the previous row.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub case: String,
    pub kind: String,
    pub t_final: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.observed_order).collect()
    }
}

pub fn l2_distance(grid: &Grid, a: &ScalarField, b: &ScalarField) -> f64 {
    a.sub(b).l2_norm_squared(grid).sqrt()
}

fn fill_orders(rows: &mut [ConvergenceRow]) {
    for i in 1..rows.len() {
        let (prev, cur) = (rows[i - 1].error, rows[i].error);
        rows[i].observed_order = (prev > 0.0 && cur > 0.0).then(|| (prev / cur).log2());
    }
}

/// Error at `t_final` against the exact solution on each grid, with the
/// default stable step.
pub fn spatial_study(case: &str, grids: &[usize], t_final: f64) -> Result<ConvergenceTable, SolverError> {
    let controls = StepControls::default();
    let mut rows = Vec::new();
    for &n in grids {
        let mc = manufactured_case(case, n, t_final)?;
        let traj = run(&mc.spec, &controls)?;
        let error = l2_distance(&mc.spec.grid, &traj.last().u, &mc.exact_at(t_final));
        rows.push(ConvergenceRow {
            cells_per_axis: n,
            dt: stable_dt(&mc.spec, &controls),
            steps: traj.steps.len(),
            error,
            observed_order: None,
        });
    }
    fill_orders(&mut rows);
    Ok(ConvergenceTable { case: case.to_string(), kind: "spatial".into(), t_final, rows })
}

/// Self-convergence in time on a fixed grid: runs with `dt0 / 2^k` for
/// `k = 0..levels`, where `dt0` divides `t_final` and respects the stability
/// limit; row `k` holds the distance between levels `k` and `k + 1`.
pub fn temporal_study(case: &str, n: usize, t_final: f64, levels: usize) -> Result<ConvergenceTable, SolverError> {
    let mc = manufactured_case(case, n, t_final)?;
    let limit = stable_dt(&mc.spec, &StepControls::default());
    let dt0 = t_final / (t_final / limit).ceil();
    let mut finals = Vec::new();
    for k in 0..levels {
        let dt = dt0 / f64::powi(2.0, k as i32);
        let controls = StepControls { max_dt: Some(dt), ..StepControls::default() };
        let traj = run(&mc.spec, &controls)?;
        finals.push((dt, traj.steps.len(), traj.last().u.clone()));
    }
    let mut rows = Vec::new();
    for w in finals.windows(2) {
        rows.push(ConvergenceRow {
            cells_per_axis: n,
            dt: w[0].0,
            steps: w[0].1,
            error: l2_distance(&mc.spec.grid, &w[0].2, &w[1].2),
            observed_order: None,
        });
    }
    fill_orders(&mut rows);
    Ok(ConvergenceTable { case: case.to_string(), kind: "temporal".into(), t_final, rows })
}
