//! Fractional Brownian motion: covariance, exact synthesis on a uniform grid,
//! and Gaussian characteristic functionals of increment combinations.

mod functional;
mod synthesis;

pub use functional::{characteristic_functional, lnd_ratio, ConfigurationTimes};
pub use synthesis::{generate_path, FbmGenerator, FbmPath, Synthesis};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SiltError};

/// Hurst index, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HurstParameter(f64);

impl HurstParameter {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(HurstParameter(value))
        } else {
            Err(SiltError::domain("hurst", format!("{value} is not in (0, 1)")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// 2H, the exponent of the increment variance.
    #[inline]
    pub fn twice(self) -> f64 {
        2.0 * self.0
    }
}

impl TryFrom<f64> for HurstParameter {
    type Error = SiltError;

    fn try_from(value: f64) -> Result<Self> {
        HurstParameter::new(value)
    }
}

impl From<HurstParameter> for f64 {
    fn from(h: HurstParameter) -> f64 {
        h.0
    }
}

/// `E[B_s B_t] = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2`.
pub fn covariance(s: f64, t: f64, hurst: HurstParameter) -> Result<f64> {
    if !(s >= 0.0 && t >= 0.0) {
        return Err(SiltError::domain(
            "time",
            format!("covariance needs nonnegative times, got ({s}, {t})"),
        ));
    }
    Ok(covariance_unchecked(s, t, hurst.twice()))
}

#[inline]
pub(crate) fn covariance_unchecked(s: f64, t: f64, two_h: f64) -> f64 {
    0.5 * (s.powf(two_h) + t.powf(two_h) - (t - s).abs().powf(two_h))
}

/// Covariance of the increments `B_b - B_a` and `B_d - B_c`.
#[inline]
pub(crate) fn increment_covariance(a: f64, b: f64, c: f64, d: f64, two_h: f64) -> f64 {
    let p = |x: f64| x.abs().powf(two_h);
    0.5 * (p(d - a) + p(c - b) - p(d - b) - p(c - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: f64) -> HurstParameter {
        HurstParameter::new(v).unwrap()
    }

    #[test]
    fn hurst_rejects_closed_endpoints() {
        assert!(HurstParameter::new(0.0).is_err());
        assert!(HurstParameter::new(1.0).is_err());
        assert!(HurstParameter::new(f64::NAN).is_err());
        assert!(HurstParameter::new(0.5).is_ok());
    }

    #[test]
    fn brownian_covariance_is_min() {
        assert_eq!(covariance(1.0, 1.0, h(0.5)).unwrap(), 1.0);
        assert_eq!(covariance(1.0, 2.0, h(0.5)).unwrap(), 1.0);
        assert!((covariance(0.3, 0.7, h(0.5)).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn diagonal_is_variance() {
        for &hv in &[0.1, 0.3, 0.7, 0.95] {
            let t: f64 = 1.7;
            let c = covariance(t, t, h(hv)).unwrap();
            assert!((c - t.powf(2.0 * hv)).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_time_is_domain_error() {
        assert!(matches!(
            covariance(-0.1, 1.0, h(0.4)),
            Err(SiltError::Domain { .. })
        ));
    }

    #[test]
    fn increment_covariance_diagonal() {
        let v = increment_covariance(0.2, 0.9, 0.2, 0.9, 0.6);
        assert!((v - 0.7f64.powf(0.6)).abs() < 1e-15);
    }
}
