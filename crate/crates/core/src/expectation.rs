//! Exact means of the mollified derivative self-intersection local time and
//! their small-`y` asymptotics.
//!
//! With `v(u) = eps + u^{2H}` the mean reduces, after `u = s - r`, to
//! `-y / sqrt(2 pi) * int_0^t (t - u) exp(-y^2 / (2 v)) v^{-3/2} du`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SiltError};
use crate::fbm::HurstParameter;
use crate::mollifier::{exp_or_zero, UNDERFLOW_EXPONENT};
use crate::quadrature::{geometric_breakpoints, integrate_pieces, Tolerance};

/// Absolute tolerance requested on every mean.
pub const ABS_TOLERANCE: f64 = 1e-10;

/// `H` values closer than this to `1/3` are treated as the critical case.
pub const CRITICAL_WINDOW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub t: f64,
    pub y: f64,
    pub epsilon: f64,
    pub hurst: HurstParameter,
}

fn sqrt_2pi() -> f64 {
    (2.0 * PI).sqrt()
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(SiltError::domain("t", format!("{t} must be finite and > 0")))
    }
}

/// `int_0^t (t - u) exp(-y^2/(2v)) v^{-3/2} du`, `v = eps + u^{2H}`.
fn mean_integral(t: f64, y: f64, epsilon: f64, hurst: HurstParameter) -> Result<(f64, f64)> {
    let two_h = hurst.twice();
    let y2 = y * y;
    let lo = if epsilon > 0.0 {
        1e-3 * epsilon.powf(1.0 / two_h).min(t)
    } else {
        // Below this u the exponent is under the underflow threshold.
        (y2 / (2.0 * -UNDERFLOW_EXPONENT)).powf(1.0 / two_h)
    };
    if lo >= t {
        return Ok((0.0, 0.0));
    }
    let mut breaks = geometric_breakpoints(lo, t);
    if epsilon > 0.0 {
        breaks.insert(0, 0.0);
    }
    let integrand = |u: f64| {
        let v = epsilon + u.powf(two_h);
        if v <= 0.0 {
            return 0.0;
        }
        (t - u) * exp_or_zero(-0.5 * y2 / v) / (v * v.sqrt())
    };
    let tol = Tolerance {
        abs: ABS_TOLERANCE * sqrt_2pi() / y.abs(),
        rel: 1e-10,
        max_intervals: 20_000,
    };
    let r = integrate_pieces(integrand, &breaks, tol).map_err(|e| match e {
        SiltError::Quadrature {
            best,
            achieved,
            requested,
        } => {
            let scale = y.abs() / sqrt_2pi();
            SiltError::Quadrature {
                best: -y.signum() * scale * best,
                achieved: scale * achieved,
                requested: scale * requested,
            }
        }
        other => other,
    })?;
    Ok((r.value, r.abs_error))
}

fn mean_impl(t: f64, y: f64, epsilon: f64, hurst: HurstParameter) -> Result<ExpectationResult> {
    check_time(t)?;
    if !y.is_finite() {
        return Err(SiltError::domain("y", format!("{y} must be finite")));
    }
    let (value, abs_error_estimate) = if y == 0.0 {
        (0.0, 0.0)
    } else {
        let (j, err) = mean_integral(t, y, epsilon, hurst)?;
        let scale = y.abs() / sqrt_2pi();
        (-y.signum() * scale * j, scale * err)
    };
    Ok(ExpectationResult {
        value,
        abs_error_estimate,
        t,
        y,
        epsilon,
        hurst,
    })
}

/// Mean of the mollified derivative at `(t, y, eps)`; `y = 0` gives exactly 0.
pub fn mean_alpha_prime_eps(
    t: f64,
    y: f64,
    epsilon: f64,
    hurst: HurstParameter,
) -> Result<ExpectationResult> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(SiltError::domain(
            "epsilon",
            format!("{epsilon} must be finite and > 0"),
        ));
    }
    mean_impl(t, y, epsilon, hurst)
}

/// The `eps = 0` mean.
pub fn mean_alpha_prime(t: f64, y: f64, hurst: HurstParameter) -> Result<ExpectationResult> {
    mean_impl(t, y, 0.0, hurst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `1/3 < H < 2/3`
    Supercritical,
    /// `H = 1/3`
    Critical,
    /// `H < 1/3`
    Subcritical,
}

/// Normalizer `N(y)` with `E[mean] ~ constant * N(y)` as `y -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Scaling {
    /// `sgn(y) |y|^exponent`
    SignedPower { exponent: f64 },
    /// `y log|y|`
    YLogAbsY,
    /// `y`
    Linear,
}

impl Scaling {
    pub fn evaluate(&self, y: f64) -> f64 {
        match *self {
            Scaling::SignedPower { exponent } => y.signum() * y.abs().powf(exponent),
            Scaling::YLogAbsY => y * y.abs().ln(),
            Scaling::Linear => y,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Scaling::SignedPower { exponent } => format!("sgn(y)|y|^{exponent}"),
            Scaling::YLogAbsY => "y*log|y|".into(),
            Scaling::Linear => "y".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRegime {
    pub regime: Regime,
    pub scaling: Scaling,
    pub constant: f64,
    pub abs_error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeClass {
    pub regime: Regime,
    pub continuous_at_zero: bool,
}

fn check_scope(hurst: HurstParameter) -> Result<f64> {
    let h = hurst.value();
    if h >= 2.0 / 3.0 {
        return Err(SiltError::domain(
            "hurst",
            format!("{h} outside the small-y analysis range (0, 2/3)"),
        ));
    }
    Ok(h)
}

fn regime_of(h: f64) -> Regime {
    if (h - 1.0 / 3.0).abs() < CRITICAL_WINDOW {
        Regime::Critical
    } else if h > 1.0 / 3.0 {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    }
}

pub fn regime_classify(hurst: HurstParameter) -> Result<RegimeClass> {
    let h = check_scope(hurst)?;
    Ok(RegimeClass {
        regime: regime_of(h),
        continuous_at_zero: h < 0.5,
    })
}

/// `int_0^inf v^{-3H} exp(-v^{-2H}/2) dv` for `1/3 < H`, by quadrature in `x = ln v`.
pub fn supercritical_integral(hurst: HurstParameter) -> Result<(f64, f64)> {
    let h = hurst.value();
    if h <= 1.0 / 3.0 {
        return Err(SiltError::domain(
            "hurst",
            format!("integral diverges for H = {h} <= 1/3"),
        ));
    }
    let decay = 3.0 * h - 1.0;
    let g = move |x: f64| exp_or_zero((1.0 - 3.0 * h) * x - 0.5 * (-2.0 * h * x).exp());
    let peak = -((decay / h).ln()) / (2.0 * h);
    // Left: exp(-2Hx)/2 beyond the underflow threshold. Right: e^{-40} below the peak scale.
    let x_lo = -(2.0 * 800.0f64).ln() / (2.0 * h);
    let x_hi = peak.max(0.0) + 40.0 / decay;
    let pieces = ((x_hi - x_lo).ceil() as usize).clamp(8, 400);
    let step = (x_hi - x_lo) / pieces as f64;
    let breaks: Vec<f64> = (0..=pieces).map(|k| x_lo + step * k as f64).collect();
    let tol = Tolerance {
        abs: 1e-13,
        rel: 1e-13,
        max_intervals: 20_000,
    };
    let r = integrate_pieces(g, &breaks, tol)?;
    let tail = (-decay * x_hi).exp() / decay;
    Ok((r.value + tail, r.abs_error + 1e-2 * tail))
}

/// Small-`y` regime of the mean and the constant `c` with `mean ~ c * N(y)`.
pub fn asymptotic_constant(t: f64, hurst: HurstParameter) -> Result<AsymptoticRegime> {
    check_time(t)?;
    let h = check_scope(hurst)?;
    let s = sqrt_2pi();
    Ok(match regime_of(h) {
        Regime::Supercritical => {
            let (i, err) = supercritical_integral(hurst)?;
            AsymptoticRegime {
                regime: Regime::Supercritical,
                scaling: Scaling::SignedPower {
                    exponent: 1.0 / h - 2.0,
                },
                constant: -t * i / s,
                abs_error_estimate: t * err / s,
            }
        }
        Regime::Critical => AsymptoticRegime {
            regime: Regime::Critical,
            scaling: Scaling::YLogAbsY,
            constant: 3.0 * t / s,
            abs_error_estimate: 0.0,
        },
        Regime::Subcritical => AsymptoticRegime {
            regime: Regime::Subcritical,
            scaling: Scaling::Linear,
            // int_0^t (t-u) u^{-3H} du = t^{2-3H} / ((1-3H)(2-3H)).
            constant: -t.powf(2.0 - 3.0 * h) / ((1.0 - 3.0 * h) * (2.0 - 3.0 * h) * s),
            abs_error_estimate: 0.0,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: f64) -> HurstParameter {
        HurstParameter::new(v).unwrap()
    }

    #[test]
    fn zero_at_origin() {
        assert_eq!(mean_alpha_prime_eps(1.0, 0.0, 0.01, h(0.3)).unwrap().value, 0.0);
        assert_eq!(mean_alpha_prime(1.0, 0.0, h(0.6)).unwrap().value, 0.0);
    }

    #[test]
    fn odd_in_y() {
        let a = mean_alpha_prime(1.3, 0.2, h(0.45)).unwrap().value;
        let b = mean_alpha_prime(1.3, -0.2, h(0.45)).unwrap().value;
        assert_eq!(a, -b);
        assert!(a < 0.0);
    }

    #[test]
    fn brownian_against_midpoint_sum() {
        let (t, y) = (1.0, 0.4);
        let n = 2_000_000;
        let du = t / n as f64;
        let mut j = 0.0;
        for k in 0..n {
            let u = (k as f64 + 0.5) * du;
            j += (t - u) * (-y * y / (2.0 * u)).exp() * u.powf(-1.5) * du;
        }
        let want = -y / sqrt_2pi() * j;
        let got = mean_alpha_prime(t, y, h(0.5)).unwrap().value;
        assert!((got - want).abs() < 1e-8, "{got} {want}");
    }

    #[test]
    fn regimes() {
        assert_eq!(regime_classify(h(0.3)).unwrap().regime, Regime::Subcritical);
        assert!(regime_classify(h(0.3)).unwrap().continuous_at_zero);
        let c = regime_classify(h(0.5)).unwrap();
        assert_eq!(c.regime, Regime::Supercritical);
        assert!(!c.continuous_at_zero);
        let c = regime_classify(h(1.0 / 3.0)).unwrap();
        assert_eq!(c.regime, Regime::Critical);
        assert!(c.continuous_at_zero);
        assert!(regime_classify(h(2.0 / 3.0)).is_err());
        assert!(asymptotic_constant(1.0, h(0.7)).is_err());
    }

    #[test]
    fn brownian_regime_constant_is_minus_t() {
        let a = asymptotic_constant(1.0, h(0.5)).unwrap();
        assert!((a.constant + 1.0).abs() < 1e-10, "{}", a.constant);
        let a = asymptotic_constant(2.5, h(0.5)).unwrap();
        assert!((a.constant + 2.5).abs() < 1e-10);
    }

    #[test]
    fn critical_constant() {
        let a = asymptotic_constant(2.0, h(1.0 / 3.0)).unwrap();
        assert!((a.constant - 6.0 / sqrt_2pi()).abs() < 1e-15);
    }

    #[test]
    fn scaling_forms() {
        assert_eq!(Scaling::Linear.evaluate(-0.3), -0.3);
        assert!((Scaling::SignedPower { exponent: 0.5 }.evaluate(-0.25) + 0.5).abs() < 1e-15);
        assert!((Scaling::YLogAbsY.evaluate(0.5) - 0.5 * 0.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(mean_alpha_prime_eps(1.0, 0.1, 0.0, h(0.3)).is_err());
        assert!(mean_alpha_prime(0.0, 0.1, h(0.3)).is_err());
        assert!(supercritical_integral(h(0.3)).is_err());
    }
}
