use serde::{Deserialize, Serialize};

use crate::error::{Result, SiltError};

/// A `C^1` test function with a closed-form derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `exp(-(x - center)^2 / (2 width^2))`
    Gaussian { center: f64, width: f64 },
    /// `sum_k c_k x^k`, multiplied by `(1 - (x/R)^2)^3` on `|x| < R` when a radius is set.
    PolynomialCutoff {
        coefficients: Vec<f64>,
        radius: Option<f64>,
    },
    /// `cos(frequency x + phase)`
    Cosine { frequency: f64, phase: f64 },
}

fn poly(c: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &ck in c.iter().rev() {
        d = d * x + v;
        v = v * x + ck;
    }
    (v, d)
}

impl TestFunction {
    pub fn gaussian(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite() && center.is_finite()) {
            return Err(SiltError::domain("g", "gaussian needs finite center and width > 0"));
        }
        TestFunction::Gaussian { center, width }.validated()
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        TestFunction::PolynomialCutoff {
            coefficients,
            radius: None,
        }
        .validated()
    }

    pub fn polynomial_cutoff(coefficients: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(SiltError::domain("g", "cutoff radius must be > 0"));
        }
        TestFunction::PolynomialCutoff {
            coefficients,
            radius: Some(radius),
        }
        .validated()
    }

    pub fn cosine(frequency: f64, phase: f64) -> Result<Self> {
        TestFunction::Cosine { frequency, phase }.validated()
    }

    /// `g = 1`.
    pub fn constant_one() -> Self {
        TestFunction::PolynomialCutoff {
            coefficients: vec![1.0],
            radius: None,
        }
    }

    /// `g(x) = x`.
    pub fn identity() -> Self {
        TestFunction::PolynomialCutoff {
            coefficients: vec![0.0, 1.0],
            radius: None,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.value_and_derivative(x).0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.value_and_derivative(x).1
    }

    pub fn value_and_derivative(&self, x: f64) -> (f64, f64) {
        match self {
            TestFunction::Gaussian { center, width } => {
                let z = (x - center) / width;
                let v = (-0.5 * z * z).exp();
                (v, -z / width * v)
            }
            TestFunction::PolynomialCutoff {
                coefficients,
                radius,
            } => {
                let (p, dp) = poly(coefficients, x);
                match radius {
                    None => (p, dp),
                    Some(r) => {
                        let u = x / r;
                        if u.abs() >= 1.0 {
                            return (0.0, 0.0);
                        }
                        let b = 1.0 - u * u;
                        let c = b * b * b;
                        let dc = -6.0 * u / r * b * b;
                        (p * c, dp * c + p * dc)
                    }
                }
            }
            TestFunction::Cosine { frequency, phase } => {
                let a = frequency * x + phase;
                (a.cos(), -frequency * a.sin())
            }
        }
    }

    /// Checks the closed-form derivative against central differences.
    pub fn validated(self) -> Result<Self> {
        let probes = [-2.3, -1.1, -0.4, -0.05, 0.0, 0.17, 0.6, 1.3, 2.9];
        let h = 1e-5;
        let derivs: Vec<f64> = probes.iter().map(|&x| self.derivative(x)).collect();
        let scale = derivs.iter().fold(0.0f64, |a, d| a.max(d.abs())).max(1e-300);
        for (&x, &d) in probes.iter().zip(&derivs) {
            let fd = (self.value(x + h) - self.value(x - h)) / (2.0 * h);
            if !fd.is_finite() || (fd - d).abs() > 1e-6 * (d.abs() + 1e-3 * scale) {
                return Err(SiltError::domain(
                    "g",
                    format!("derivative {d} disagrees with finite difference {fd} at x = {x}"),
                ));
            }
        }
        Ok(self)
    }
}
