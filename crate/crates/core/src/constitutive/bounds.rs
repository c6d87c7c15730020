//! Randomized verification of the explicit pointwise bounds satisfied by `X`
//! and `X'`.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{kernel_constants, ForchheimerLaw, Inverter, KernelConstants, RotationSpec, ToleranceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Inequality {
    X0Lower,
    X0Upper,
    X1Lower,
    X1Upper,
    X2Lower,
    X2Upper,
    X3Lower,
    X3Upper,
    XprimeLower,
    XprimeUpper,
    Ellipticity,
    Monotonicity,
    RotationDissipation,
    Inversion,
}

impl Inequality {
    pub fn id(&self) -> &'static str {
        match self {
            Self::X0Lower => "X0-lower",
            Self::X0Upper => "X0-upper",
            Self::X1Lower => "X1-lower",
            Self::X1Upper => "X1-upper",
            Self::X2Lower => "X2-lower",
            Self::X2Upper => "X2-upper",
            Self::X3Lower => "X3-lower",
            Self::X3Upper => "X3-upper",
            Self::XprimeLower => "Xprime-lower",
            Self::XprimeUpper => "Xprime-upper",
            Self::Ellipticity => "hXh",
            Self::Monotonicity => "Fmono",
            Self::RotationDissipation => "newpos",
            Self::Inversion => "inversion",
        }
    }

    /// Norm and inner-product bounds on `X`.
    pub fn is_norm_bound(&self) -> bool {
        matches!(
            self,
            Self::X0Lower
                | Self::X0Upper
                | Self::X1Lower
                | Self::X1Upper
                | Self::X2Lower
                | Self::X2Upper
                | Self::X3Lower
                | Self::X3Upper
        )
    }

    /// Bounds on `X'`.
    pub fn is_derivative_bound(&self) -> bool {
        matches!(self, Self::XprimeLower | Self::XprimeUpper | Self::Ellipticity | Self::RotationDissipation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub inequality: String,
    pub point: [f64; 3],
    /// `rhs - lhs` for an inequality `lhs <= rhs`; negative here.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub samples_checked: usize,
    /// Number of evaluations per inequality id.
    pub checks: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
    /// Largest deficit `(lhs - rhs) / scale` over all checks, where `scale` is
    /// the inequality's tolerance scale. A negative value means every checked
    /// instance holds strictly.
    pub max_slack: f64,
}

impl BoundReport {
    pub fn new() -> Self {
        Self { samples_checked: 0, checks: BTreeMap::new(), violations: Vec::new(), max_slack: f64::NEG_INFINITY }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, id: &str) -> usize {
        self.violations.iter().filter(|v| v.inequality == id).count()
    }

    pub fn checks_of(&self, id: &str) -> usize {
        self.checks.get(id).copied().unwrap_or(0)
    }

    /// Records `lhs <= rhs` with tolerance `tol_scale * rel_tol`.
    pub fn record(&mut self, id: &str, point: [f64; 3], lhs: f64, rhs: f64, tol_scale: f64, rel_tol: f64) {
        *self.checks.entry(id.to_string()).or_insert(0) += 1;
        let slack = rhs - lhs;
        let deficit = if slack.is_nan() { f64::INFINITY } else { -slack / tol_scale };
        if deficit > self.max_slack {
            self.max_slack = deficit;
        }
        if !(deficit <= rel_tol) {
            self.violations.push(Violation { inequality: id.to_string(), point, slack });
        }
    }

    pub fn merge(&mut self, other: BoundReport) {
        self.samples_checked += other.samples_checked;
        for (k, n) in other.checks {
            *self.checks.entry(k).or_insert(0) += n;
        }
        self.violations.extend(other.violations);
        self.max_slack = self.max_slack.max(other.max_slack);
    }
}

impl Default for BoundReport {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundOptions {
    pub num_samples: usize,
    pub radius: f64,
    pub seed: u64,
    pub xi_per_sample: usize,
    pub tolerance: ToleranceSpec,
    /// Relative tolerance applied to every inequality.
    pub slack_tolerance: f64,
}

impl BoundOptions {
    pub fn new(num_samples: usize, radius: f64, seed: u64) -> Self {
        Self {
            num_samples,
            radius,
            seed,
            xi_per_sample: 16,
            tolerance: ToleranceSpec::default(),
            slack_tolerance: 1e-12,
        }
    }
}

pub(crate) fn random_in_unit_ball<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm_squared() <= 1.0 {
            return v;
        }
    }
}

pub(crate) fn random_unit<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = random_in_unit_ball(rng);
        let n = v.norm();
        if n > 1e-3 {
            return v / n;
        }
    }
}

/// Uniform sample in the ball of the given radius.
pub(crate) fn random_in_ball<R: Rng>(rng: &mut R, radius: f64) -> Vector3<f64> {
    let dir = random_unit(rng);
    dir * (radius * rng.random::<f64>().cbrt())
}

fn edge_points<R: Rng>(rng: &mut R, rot: &RotationSpec, radius: f64) -> Vec<Vector3<f64>> {
    let mut pts = vec![Vector3::zeros()];
    let mut dirs: Vec<Vector3<f64>> = (0..3)
        .map(|i| {
            let mut e = Vector3::zeros();
            e[i] = 1.0;
            e
        })
        .collect();
    dirs.push(rot.axis());
    for d in dirs {
        for &r in &[1e-8, 1e-4, 1e-2, 1.0, 1e2, radius] {
            if r <= radius {
                pts.push(d * r);
                pts.push(-d * r);
            }
        }
    }
    for _ in 0..8 {
        pts.push(random_unit(rng));
    }
    pts
}

/// Checks every explicit bound on `X` and `X'` with the law's own constants.
pub fn verify_kernel_bounds(
    law: &ForchheimerLaw,
    rot: &RotationSpec,
    num_samples: usize,
    radius: f64,
    seed: u64,
) -> BoundReport {
    let consts = kernel_constants(law, rot);
    verify_kernel_bounds_with(law, rot, &consts, &BoundOptions::new(num_samples, radius, seed))
}

/// Same as [`verify_kernel_bounds`] with caller-supplied constants.
pub fn verify_kernel_bounds_with(
    law: &ForchheimerLaw,
    rot: &RotationSpec,
    k: &KernelConstants,
    opts: &BoundOptions,
) -> BoundReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let inverter = Inverter::new(law, rot, opts.tolerance);
    let (_, j2) = rot.matrices();
    let mut points = edge_points(&mut rng, rot, opts.radius);
    for _ in 0..opts.num_samples {
        points.push(random_in_ball(&mut rng, opts.radius));
    }

    let mut report = BoundReport::new();
    let tol = opts.slack_tolerance;
    let mut previous: Option<Vector3<f64>> = None;
    for y in &points {
        report.samples_checked += 1;
        let p = [y.x, y.y, y.z];
        let (inv, xp) = match inverter.solve_with_jacobian(y) {
            Ok(r) => r,
            Err(_) => {
                report.record(Inequality::Inversion.id(), p, 1.0, 0.0, 1.0, tol);
                continue;
            }
        };
        check_norm_bounds(&mut report, k, y, &inv.v, tol);
        check_derivative_bounds(&mut report, k, &j2, y, &xp, &mut rng, opts.xi_per_sample, tol);

        let v = inv.v;
        let mut partners = vec![v + random_in_ball(&mut rng, 1e-3 * (1.0 + v.norm()))];
        if let Some(w) = previous {
            partners.push(w);
        }
        for w in partners {
            check_monotonicity(&mut report, law.a0(), &inverter, &v, &w, tol);
        }
        previous = Some(v);
    }
    report
}

/// Checks `(F(v) - F(w))·(v - w) >= a0 |v - w|²` with absolute tolerance.
pub(crate) fn check_monotonicity(
    report: &mut BoundReport,
    a0: f64,
    inverter: &Inverter<'_>,
    v: &Vector3<f64>,
    w: &Vector3<f64>,
    tol: f64,
) {
    let d = v - w;
    let lhs = (inverter.forward(v) - inverter.forward(w)).dot(&d);
    report.record(Inequality::Monotonicity.id(), [v.x, v.y, v.z], a0 * d.norm_squared(), lhs, 1.0, tol);
}

fn check_norm_bounds(report: &mut BoundReport, k: &KernelConstants, y: &Vector3<f64>, x: &Vector3<f64>, tol: f64) {
    let p = [y.x, y.y, y.z];
    let r = y.norm();
    let a = k.a;
    let scale = (1.0 + r) * (1.0 + r);
    let xn = x.norm();
    let xy = x.dot(y);
    let damp = (1.0 + r).powf(-a);
    let r1a = r.powf(1.0 - a);
    let r2a = r.powf(2.0 - a);

    report.record(Inequality::X0Lower.id(), p, k.c1 / k.chi1 * r * damp, xn, scale, tol);
    report.record(Inequality::X0Upper.id(), p, xn, k.c2 * k.chi1.powf(a) * r * damp, scale, tol);
    report.record(Inequality::X1Lower.id(), p, k.chi1.powf(a - 1.0) * r1a - 1.0, xn, scale, tol);
    report.record(Inequality::X1Upper.id(), p, xn, k.c3 * r1a, scale, tol);
    report.record(Inequality::X2Lower.id(), p, k.c4 / (k.chi1 * k.chi1) * r * r * damp, xy, scale, tol);
    report.record(Inequality::X2Upper.id(), p, xy, k.c2 * k.chi1.powf(a) * r * r * damp, scale, tol);
    report.record(Inequality::X3Lower.id(), p, k.c5 / (k.chi1 * k.chi1) * (r2a - 1.0), xy, scale, tol);
    report.record(Inequality::X3Upper.id(), p, xy, k.c3 * r2a, scale, tol);
}

#[allow(clippy::too_many_arguments)]
fn check_derivative_bounds<R: Rng>(
    report: &mut BoundReport,
    k: &KernelConstants,
    j2: &Matrix3<f64>,
    y: &Vector3<f64>,
    xp: &Matrix3<f64>,
    rng: &mut R,
    xi_count: usize,
    tol: f64,
) {
    let p = [y.x, y.y, y.z];
    let damp = (1.0 + y.norm()).powf(-k.a);
    let norm = xp.norm();
    let lower = k.c6 / k.chi1 * damp;
    let upper = k.c7 * (1.0 + k.chi1).powf(k.a) * damp;
    report.record(Inequality::XprimeLower.id(), p, lower, norm, lower, tol);
    report.record(Inequality::XprimeUpper.id(), p, norm, upper, upper, tol);

    let ell = k.c8 / (k.chi1 * k.chi1) * damp;
    for _ in 0..xi_count {
        let xi = random_unit(rng);
        let q = xi.dot(&(xp * xi));
        report.record(Inequality::Ellipticity.id(), p, ell, q, ell, tol);
    }

    // J² is symmetric, so sym(X'):J² = X':J²
    let contraction = xp.component_mul(j2).sum();
    report.record(Inequality::RotationDissipation.id(), p, contraction, 0.0, 1.0, tol);
}
