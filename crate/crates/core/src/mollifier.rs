//! Gaussian approximate identity `f_eps` of variance `eps` and its derivative.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SiltError};

/// Exponent below which `exp` is treated as exactly zero.
pub const UNDERFLOW_EXPONENT: f64 = -745.0;

#[inline]
pub(crate) fn exp_or_zero(arg: f64) -> f64 {
    if arg < UNDERFLOW_EXPONENT {
        0.0
    } else {
        arg.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Mollifier {
    epsilon: f64,
    norm: f64,
}

impl TryFrom<f64> for Mollifier {
    type Error = SiltError;

    fn try_from(epsilon: f64) -> Result<Self> {
        Mollifier::new(epsilon)
    }
}

impl From<Mollifier> for f64 {
    fn from(m: Mollifier) -> f64 {
        m.epsilon
    }
}

impl Mollifier {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(SiltError::domain(
                "epsilon",
                format!("{epsilon} must be finite and > 0"),
            ));
        }
        Ok(Mollifier {
            epsilon,
            norm: 1.0 / (2.0 * PI * epsilon).sqrt(),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `(2 pi eps)^{-1/2} exp(-x^2 / (2 eps))`.
    #[inline]
    pub fn density(&self, x: f64) -> f64 {
        self.norm * exp_or_zero(-0.5 * x * x / self.epsilon)
    }

    /// `d/dx f_eps(x) = -x / eps * f_eps(x)`.
    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        -x / self.epsilon * self.density(x)
    }

    /// Recommended truncation for [`fourier_check`]: `12 / sqrt(eps)`.
    pub fn default_fourier_cutoff(&self) -> f64 {
        12.0 / self.epsilon.sqrt()
    }
}

pub fn f_eps(x: f64, m: &Mollifier) -> f64 {
    m.density(x)
}

pub fn f_eps_prime(x: f64, m: &Mollifier) -> f64 {
    m.derivative(x)
}

/// Values of `f_eps(x)` and `f'_eps(x)` recovered from their Fourier integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierCheck {
    pub density: f64,
    pub derivative: f64,
}

/// Evaluates `(1/2pi) int e^{ipx} e^{-eps p^2/2} dp` and
/// `(i/2pi) int p e^{ipx} e^{-eps p^2/2} dp` on `[-cutoff, cutoff]`.
///
/// Trapezoid rule on `n_nodes` points; the integrands are smooth and
/// Gaussian-damped, so the rule converges geometrically in the node count.
/// Imaginary parts cancel by symmetry and are not accumulated.
pub fn fourier_check(x: f64, m: &Mollifier, cutoff: f64, n_nodes: usize) -> Result<FourierCheck> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(SiltError::domain("cutoff", format!("{cutoff} must be > 0")));
    }
    if n_nodes < 16 {
        return Err(SiltError::domain("n_nodes", "need at least 16 nodes"));
    }
    let h = 2.0 * cutoff / (n_nodes - 1) as f64;
    let mut density = 0.0;
    let mut derivative = 0.0;
    for k in 0..n_nodes {
        let p = -cutoff + h * k as f64;
        let w = if k == 0 || k == n_nodes - 1 { 0.5 } else { 1.0 };
        let damp = exp_or_zero(-0.5 * m.epsilon * p * p);
        density += w * (p * x).cos() * damp;
        // i * p * (cos + i sin) has real part -p sin(px).
        derivative -= w * p * (p * x).sin() * damp;
    }
    Ok(FourierCheck {
        density: density * h / (2.0 * PI),
        derivative: derivative * h / (2.0 * PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = 0.5 * (f(a) + f(b));
        for k in 1..n {
            s += f(a + h * k as f64);
        }
        s * h
    }

    #[test]
    fn peak_value() {
        let m = Mollifier::new(1.0).unwrap();
        assert!((f_eps(0.0, &m) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(f_eps_prime(0.0, &m), 0.0);
    }

    #[test]
    fn parity() {
        let m = Mollifier::new(0.37).unwrap();
        for &x in &[0.01, 0.3, 1.0, 2.5, 7.0] {
            assert_eq!(m.density(x), m.density(-x));
            assert_eq!(m.derivative(x), -m.derivative(-x));
        }
    }

    #[test]
    fn normalization_and_zero_mean_derivative() {
        for &eps in &[1e-3, 1e-2, 0.1, 1.0] {
            let m = Mollifier::new(eps).unwrap();
            let r = 20.0 * eps.sqrt();
            let mass = trapezoid(|x| m.density(x), -r, r, 4000);
            let dmass = trapezoid(|x| m.derivative(x), -r, r, 4000);
            assert!((mass - 1.0).abs() < 1e-10, "eps={eps} mass={mass}");
            assert!(dmass.abs() < 1e-10, "eps={eps} dmass={dmass}");
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let m = Mollifier::new(0.5).unwrap();
        let (x, h) = (0.3, 1e-6);
        let fd = (m.density(x + h) - m.density(x - h)) / (2.0 * h);
        let exact = m.derivative(x);
        assert!(((fd - exact) / exact).abs() < 1e-6);
    }

    #[test]
    fn underflow_returns_exact_zero() {
        let m = Mollifier::new(1e-4).unwrap();
        assert_eq!(m.density(1.0), 0.0);
        assert_eq!(m.derivative(-1.0), 0.0);
        assert!(m.density(0.3) > 0.0);
    }

    #[test]
    fn fourier_representation() {
        let m = Mollifier::new(1.0).unwrap();
        let r = fourier_check(0.0, &m, 12.0, 801).unwrap();
        assert!((r.density - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-8);
        assert!(r.derivative.abs() < 1e-10);

        let m = Mollifier::new(0.25).unwrap();
        let r = fourier_check(1.0, &m, m.default_fourier_cutoff(), 1601).unwrap();
        assert!(((r.density - m.density(1.0)) / m.density(1.0)).abs() < 1e-8);
        assert!(((r.derivative - m.derivative(1.0)) / m.derivative(1.0)).abs() < 1e-8);
    }

    #[test]
    fn fourier_rejects_bad_arguments() {
        let m = Mollifier::new(1.0).unwrap();
        assert!(fourier_check(0.0, &m, 12.0, 8).is_err());
        assert!(fourier_check(0.0, &m, -1.0, 100).is_err());
        assert!(Mollifier::new(0.0).is_err());
    }
}
