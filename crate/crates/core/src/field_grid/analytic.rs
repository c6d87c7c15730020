use nalgebra::{Matrix3, Vector3};

/// A smooth function of `(x, t)` with analytic first and second derivatives.
pub trait SpaceTimeField: Send + Sync {
    fn value(&self, x: &Vector3<f64>, t: f64) -> f64;
    fn gradient(&self, x: &Vector3<f64>, t: f64) -> Vector3<f64>;
    fn time_derivative(&self, x: &Vector3<f64>, t: f64) -> f64;
    fn hessian(&self, x: &Vector3<f64>, t: f64) -> Matrix3<f64>;
}

/// The constant function `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField(pub f64);

impl SpaceTimeField for ConstantField {
    fn value(&self, _: &Vector3<f64>, _: f64) -> f64 {
        self.0
    }
    fn gradient(&self, _: &Vector3<f64>, _: f64) -> Vector3<f64> {
        Vector3::zeros()
    }
    fn time_derivative(&self, _: &Vector3<f64>, _: f64) -> f64 {
        0.0
    }
    fn hessian(&self, _: &Vector3<f64>, _: f64) -> Matrix3<f64> {
        Matrix3::zeros()
    }
}

/// `c + b·x + d t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineField {
    pub constant: f64,
    pub slope: Vector3<f64>,
    pub rate: f64,
}

impl SpaceTimeField for AffineField {
    fn value(&self, x: &Vector3<f64>, t: f64) -> f64 {
        self.constant + self.slope.dot(x) + self.rate * t
    }
    fn gradient(&self, _: &Vector3<f64>, _: f64) -> Vector3<f64> {
        self.slope
    }
    fn time_derivative(&self, _: &Vector3<f64>, _: f64) -> f64 {
        self.rate
    }
    fn hessian(&self, _: &Vector3<f64>, _: f64) -> Matrix3<f64> {
        Matrix3::zeros()
    }
}

/// `c + A Π_d sin(π (x_d − lo_d)/L_d)^{m_d} · (1 + r t)`, with `m_d ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineProductField {
    pub constant: f64,
    pub amplitude: f64,
    pub lo: [f64; 3],
    pub len: [f64; 3],
    pub active: [bool; 3],
    pub rate: f64,
}

impl SineProductField {
    fn factors(&self, x: &Vector3<f64>) -> ([f64; 3], [f64; 3], [f64; 3]) {
        let mut s = [1.0; 3];
        let mut ds = [0.0; 3];
        let mut dds = [0.0; 3];
        for d in 0..3 {
            if self.active[d] {
                let k = std::f64::consts::PI / self.len[d];
                let (sn, cs) = (k * (x[d] - self.lo[d])).sin_cos();
                s[d] = sn;
                ds[d] = k * cs;
                dds[d] = -k * k * sn;
            }
        }
        (s, ds, dds)
    }

    fn time_factor(&self, t: f64) -> f64 {
        1.0 + self.rate * t
    }
}

impl SpaceTimeField for SineProductField {
    fn value(&self, x: &Vector3<f64>, t: f64) -> f64 {
        let (s, _, _) = self.factors(x);
        self.constant + self.amplitude * s[0] * s[1] * s[2] * self.time_factor(t)
    }
    fn gradient(&self, x: &Vector3<f64>, t: f64) -> Vector3<f64> {
        let (s, ds, _) = self.factors(x);
        let a = self.amplitude * self.time_factor(t);
        Vector3::new(ds[0] * s[1] * s[2], s[0] * ds[1] * s[2], s[0] * s[1] * ds[2]) * a
    }
    fn time_derivative(&self, x: &Vector3<f64>, _: f64) -> f64 {
        let (s, _, _) = self.factors(x);
        self.amplitude * s[0] * s[1] * s[2] * self.rate
    }
    fn hessian(&self, x: &Vector3<f64>, t: f64) -> Matrix3<f64> {
        let (s, ds, dds) = self.factors(x);
        let a = self.amplitude * self.time_factor(t);
        let mut h = Matrix3::zeros();
        for p in 0..3 {
            for q in 0..3 {
                let mut prod = 1.0;
                for d in 0..3 {
                    prod *= if p == q && d == p {
                        dds[d]
                    } else if d == p || d == q {
                        ds[d]
                    } else {
                        s[d]
                    };
                }
                h[(p, q)] = a * prod;
            }
        }
        h
    }
}
