use serde::{Deserialize, Serialize};

use super::{ForchheimerLaw, RotationSpec};

/// Norm-equivalence constant `|A| <= c_* |A|_op` for 3×3 matrices.
pub const C_STAR: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    pub a: f64,
    pub chi0: f64,
    pub chi1: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub c_star: f64,
}

impl KernelConstants {
    /// `Λ = c7 (1 + χ1)^a`, the uniform upper bound of `|X'|`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.c7 * (1.0 + self.chi1).powf(self.a)
    }
}

pub fn kernel_constants(law: &ForchheimerLaw, rot: &RotationSpec) -> KernelConstants {
    let alpha_n = law.alpha_n();
    let a0 = law.a0();
    let an = law.a_n();
    let a = alpha_n / (1.0 + alpha_n);
    let chi0 = law.chi0();
    let chi1 = chi0 + rot.coriolis();
    let min_a0_an = a0.min(an);
    let two_alpha = 2f64.powf(alpha_n);
    let c1 = chi0.min(1.0).powf(a);
    let c2 = 2f64.powf(a) / (c1 * min_a0_an);
    let c3 = an.powf(a - 1.0);
    let c4 = (1f64.min(a0).min(an) / two_alpha).powf(1.0 + a);
    let c5 = 2f64.powf(-a) * c4;
    let c6 = 3f64.sqrt() * (an.min(1.0) / two_alpha).powf(a) / (alpha_n + 2.0);
    let c7 = C_STAR * two_alpha / min_a0_an;
    let c8 = c4 / ((alpha_n + 2.0) * (alpha_n + 2.0));
    let c9 = 3f64.sqrt() / (alpha_n + 2.0);
    KernelConstants { a, chi0, chi1, c1, c2, c3, c4, c5, c6, c7, c8, c9, c_star: C_STAR }
}
