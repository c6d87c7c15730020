use serde::{Deserialize, Serialize};

use super::KernelError;

/// Generalized polynomial `g(s) = a0 + a1 s^α1 + ... + aN s^αN` with
/// `0 < α1 < ... < αN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForchheimerLaw {
    coeffs: Vec<f64>,
    exponents: Vec<f64>,
    #[serde(skip)]
    integer_exponents: Vec<Option<i32>>,
}

impl ForchheimerLaw {
    /// `coeffs` holds `a0..aN`, `exponents` holds `α1..αN`.
    pub fn new(coeffs: Vec<f64>, exponents: Vec<f64>) -> Result<Self, KernelError> {
        let n = exponents.len();
        if n == 0 {
            return Err(KernelError::InvalidLaw("at least one exponent is required".into()));
        }
        if coeffs.len() != n + 1 {
            return Err(KernelError::InvalidLaw(format!(
                "expected {} coefficients for {} exponents, got {}",
                n + 1,
                n,
                coeffs.len()
            )));
        }
        if coeffs.iter().chain(exponents.iter()).any(|c| !c.is_finite()) {
            return Err(KernelError::InvalidLaw("coefficients and exponents must be finite".into()));
        }
        if coeffs[0] <= 0.0 || coeffs[n] <= 0.0 {
            return Err(KernelError::InvalidLaw("a0 and aN must be positive".into()));
        }
        if coeffs.iter().any(|&c| c < 0.0) {
            return Err(KernelError::InvalidLaw("coefficients must be nonnegative".into()));
        }
        if exponents[0] <= 0.0 {
            return Err(KernelError::InvalidLaw("exponents must be positive".into()));
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(KernelError::InvalidLaw("exponents must be strictly increasing".into()));
        }
        let integer_exponents = exponents
            .iter()
            .map(|&e| (e.fract() == 0.0 && e <= 16.0).then_some(e as i32))
            .collect();
        Ok(Self { coeffs, exponents, integer_exponents })
    }

    /// The two-term Darcy-Forchheimer law `g(s) = a0 + a1 s`.
    pub fn two_term(a0: f64, a1: f64) -> Result<Self, KernelError> {
        Self::new(vec![a0, a1], vec![1.0])
    }

    pub fn num_terms(&self) -> usize {
        self.exponents.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn a0(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn a_n(&self) -> f64 {
        self.coeffs[self.num_terms()]
    }

    pub fn alpha_n(&self) -> f64 {
        self.exponents[self.num_terms() - 1]
    }

    /// `g'` is unbounded at the origin when the smallest exponent is below one.
    pub fn singular_at_origin(&self) -> bool {
        self.exponents[0] < 1.0
    }

    #[inline]
    fn power(&self, i: usize, s: f64) -> f64 {
        match self.integer_exponents.get(i).copied().flatten() {
            Some(k) => s.powi(k),
            None => s.powf(self.exponents[i]),
        }
    }

    /// Unchecked `g(s)` for `s >= 0`.
    #[inline]
    pub(crate) fn g_unchecked(&self, s: f64) -> f64 {
        let mut acc = self.coeffs[0];
        for i in 0..self.num_terms() {
            acc += self.coeffs[i + 1] * self.power(i, s);
        }
        acc
    }

    /// Unchecked `(g(s), s g'(s))` for `s >= 0`. The product `s g'(s)` is
    /// finite at the origin for every admissible law.
    #[inline]
    pub(crate) fn g_and_sg_prime(&self, s: f64) -> (f64, f64) {
        let mut g = self.coeffs[0];
        let mut sgp = 0.0;
        for i in 0..self.num_terms() {
            let term = self.coeffs[i + 1] * self.power(i, s);
            g += term;
            sgp += self.exponents[i] * term;
        }
        (g, sgp)
    }

    /// Evaluates `g(s)` and, on request, `g'(s)`.
    pub fn eval_g(&self, s: f64, with_derivative: bool) -> Result<(f64, Option<f64>), KernelError> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(KernelError::Domain(format!("g requires s >= 0, got {s}")));
        }
        let g = self.g_unchecked(s);
        if !with_derivative {
            return Ok((g, None));
        }
        if s == 0.0 {
            if self.singular_at_origin() {
                return Err(KernelError::SingularDerivative);
            }
            // only an exponent equal to one contributes at the origin
            let d = if self.exponents[0] == 1.0 { self.coeffs[1] } else { 0.0 };
            return Ok((g, Some(d)));
        }
        let mut d = 0.0;
        for i in 0..self.num_terms() {
            let e = self.exponents[i];
            d += self.coeffs[i + 1] * e * s.powf(e - 1.0);
        }
        Ok((g, Some(d)))
    }

    /// `χ0 = g(1) = Σ a_i`.
    pub fn chi0(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Solves the scalar monotone equation `g(h) h = r` for `h >= 0`.
    ///
    /// The root is bracketed by `[0, 1 + (r/aN)^(1/(1+αN))]`; a safeguarded
    /// Newton iteration falls back to bisection whenever a step leaves the
    /// bracket.
    pub fn solve_magnitude(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let mut lo = 0.0_f64;
        let mut hi = 1.0 + (r / self.a_n()).powf(1.0 / (1.0 + self.alpha_n()));
        // initial guess from the dominant regimes
        let mut h = (r / self.a0()).min(0.5 * hi);
        for _ in 0..200 {
            let (g, sgp) = self.g_and_sg_prime(h);
            let f = g * h - r;
            if f.abs() <= 1e-15 * r {
                break;
            }
            if f > 0.0 {
                hi = h;
            } else {
                lo = h;
            }
            // d/dh (g(h) h) = g + h g'
            let df = g + sgp;
            let mut next = h - f / df;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - h).abs();
            h = next;
            if step <= 1e-15 * h || hi - lo <= 1e-15 * hi {
                break;
            }
        }
        h
    }
}
