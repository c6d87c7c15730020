use serde::{Deserialize, Serialize};

use super::energy::{boundary_history, m0_curve, TimeValue};
use super::AuditError;
use crate::solver::{ProblemSpec, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    /// `max_k (max_x u_k − P_k)⁺`, with `P_k` the largest initial or boundary
    /// value at times up to `t_k`.
    pub violation: f64,
    pub m0_curve: Vec<TimeValue>,
    /// `max_x u(x, t)` at each snapshot.
    pub max_curve: Vec<TimeValue>,
    pub nonnegative_data: bool,
}

pub fn max_principle_audit(
    traj: &Trajectory,
    spec: &ProblemSpec,
    requires_nonneg: bool,
) -> Result<MaxPrincipleReport, AuditError> {
    let first = traj
        .snapshots
        .first()
        .ok_or_else(|| AuditError::Precondition("trajectory holds no snapshots".into()))?;
    first.u.matches(&spec.grid)?;
    let history = boundary_history(traj, spec);
    let nonnegative_data = first.u.min() >= 0.0 && history.iter().all(|h| h.3 >= 0.0);
    if requires_nonneg && !nonnegative_data {
        return Err(AuditError::Precondition(
            "nonnegative initial and boundary data required, negative values found".into(),
        ));
    }
    let u0_max = first.u.max();
    let mut violation = 0.0f64;
    let mut max_curve = Vec::with_capacity(traj.snapshots.len());
    let mut k = 0;
    let mut bound = u0_max;
    for snap in &traj.snapshots {
        while k < history.len() && history[k].0 <= snap.t {
            bound = bound.max(history[k].1);
            k += 1;
        }
        let m = snap.u.max();
        violation = violation.max(m - bound);
        max_curve.push(TimeValue { t: snap.t, value: m });
    }
    Ok(MaxPrincipleReport { violation, m0_curve: m0_curve(traj, &history), max_curve, nonnegative_data })
}
