use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::spanning::MAssignment;
use crate::error::{Result, SiltError};
use crate::fbm::HurstParameter;

/// Which exponent condition to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMode {
    /// `1/H - (1 + 2 lambda) > 1`
    MainY,
    MainEps,
    /// `gamma/H - 1 > 1`
    MainT,
    /// `d(H, lambda) = min(1/H - (1 + lambda)/2, 2(1/H - 1 - lambda)) > 1`
    AppendixY,
    AppendixEps,
    /// `min(gamma/H - 1/2, 2(gamma/H - 1)) >= 1`
    AppendixT,
}

impl ExponentMode {
    pub const ALL: [ExponentMode; 6] = [
        ExponentMode::MainY,
        ExponentMode::MainEps,
        ExponentMode::MainT,
        ExponentMode::AppendixY,
        ExponentMode::AppendixEps,
        ExponentMode::AppendixT,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ExponentMode::MainY => "main-y",
            ExponentMode::MainEps => "main-eps",
            ExponentMode::MainT => "main-t",
            ExponentMode::AppendixY => "appendix-y",
            ExponentMode::AppendixEps => "appendix-eps",
            ExponentMode::AppendixT => "appendix-t",
        }
    }

    fn is_time(self) -> bool {
        matches!(self, ExponentMode::MainT | ExponentMode::AppendixT)
    }
}

impl fmt::Display for ExponentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ExponentMode {
    type Err = SiltError;

    fn from_str(s: &str) -> Result<Self> {
        ExponentMode::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| SiltError::domain("mode", format!("unknown exponent mode {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub mode: ExponentMode,
    pub hurst: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub d_value: f64,
    /// `1`; strict for all modes except `appendix-t`.
    pub threshold: f64,
    pub converges: bool,
    /// Per-gap denominator exponents `1/H - c m_j` (or `gamma/H - m_j/2` in
    /// time modes) when an assignment is given.
    pub gap_exponents: Option<Vec<f64>>,
}

/// Evaluates the convergence condition for `mode`.
///
/// `lambda` must lie in `[0, 1]` and `gamma` in `(0, 1]`; the unused one is
/// still validated so that reports are comparable.
pub fn convergence_exponents(
    hurst: HurstParameter,
    lambda: f64,
    gamma: f64,
    m: Option<&MAssignment>,
    mode: ExponentMode,
) -> Result<ExponentReport> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(SiltError::domain("lambda", format!("must lie in [0, 1], got {lambda}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(SiltError::domain("gamma", format!("must lie in (0, 1], got {gamma}")));
    }
    let h = hurst.value();
    let inv = 1.0 / h;
    let g = gamma / h;
    let d_value = match mode {
        ExponentMode::MainY | ExponentMode::MainEps => inv - (1.0 + 2.0 * lambda),
        ExponentMode::MainT => g - 1.0,
        ExponentMode::AppendixY | ExponentMode::AppendixEps => {
            (inv - 0.5 * (1.0 + lambda)).min(2.0 * (inv - (1.0 + lambda)))
        }
        ExponentMode::AppendixT => (g - 0.5).min(2.0 * (g - 1.0)),
    };
    let converges = match mode {
        ExponentMode::AppendixT => d_value >= 1.0,
        _ => d_value > 1.0,
    };
    let gap_exponents = m.map(|m| {
        m.m.iter()
            .map(|&mj| {
                let mj = mj as f64;
                match mode {
                    ExponentMode::MainY | ExponentMode::MainEps => {
                        inv - 0.5 * (1.0 + 2.0 * lambda) * mj
                    }
                    ExponentMode::AppendixY | ExponentMode::AppendixEps => {
                        inv - 0.5 * (1.0 + lambda) * mj
                    }
                    _ => {
                        debug_assert!(mode.is_time());
                        g - 0.5 * mj
                    }
                }
            })
            .collect()
    });
    Ok(ExponentReport {
        mode,
        hurst: h,
        lambda,
        gamma,
        d_value,
        threshold: 1.0,
        converges,
        gap_exponents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(h: f64) -> HurstParameter {
        HurstParameter::new(h).unwrap()
    }

    fn run(h: f64, lambda: f64, gamma: f64, mode: ExponentMode) -> ExponentReport {
        convergence_exponents(hp(h), lambda, gamma, None, mode).unwrap()
    }

    #[test]
    fn worked_values() {
        let r = run(0.3, 0.2, 1.0, ExponentMode::MainY);
        assert!((r.d_value - (1.0 / 0.3 - 1.4)).abs() < 1e-15);
        assert!(r.converges);
        let r = run(0.5, 0.0, 1.0, ExponentMode::AppendixY);
        assert!((r.d_value - 1.5).abs() < 1e-15);
        assert!(r.converges);
        let r = run(0.6, 0.2, 1.0, ExponentMode::AppendixY);
        assert!(!r.converges);
    }

    #[test]
    fn thresholds() {
        let d = 1e-6;
        for h in [0.2, 0.3, 0.45] {
            let lam = (1.0 / h - 2.0) / 2.0;
            if lam + d <= 1.0 {
                assert!(!run(h, lam + d, 1.0, ExponentMode::MainY).converges);
            }
            assert!(run(h, (lam - d).min(1.0), 1.0, ExponentMode::MainEps).converges);
        }
        for h in [0.3, 0.4] {
            assert!(run(h, 0.0, 2.0 * h + d, ExponentMode::MainT).converges);
            assert!(!run(h, 0.0, 2.0 * h - d, ExponentMode::MainT).converges);
        }
        for h in [0.45, 0.5, 0.6] {
            let lam = 1.0 / h - 1.5;
            assert!(run(h, lam - d, 1.0, ExponentMode::AppendixY).converges);
            assert!(!run(h, lam + d, 1.0, ExponentMode::AppendixEps).converges);
            assert!(run(h, 0.0, 1.5 * h + d, ExponentMode::AppendixT).converges);
            assert!(!run(h, 0.0, 1.5 * h - d, ExponentMode::AppendixT).converges);
        }
    }

    #[test]
    fn monotone_in_lambda() {
        for h in [0.1, 0.25, 0.4, 0.49] {
            let witness = (1.0 / h - 2.0) / 4.0;
            assert!(run(h, witness.min(1.0), 1.0, ExponentMode::MainY).converges);
            let mut prev = false;
            for i in (0..=100).rev() {
                let c = run(h, i as f64 / 100.0, 1.0, ExponentMode::MainY).converges;
                assert!(!(prev && !c));
                prev = c;
            }
        }
    }

    #[test]
    fn gap_exponents_follow_m() {
        let m = MAssignment::new(vec![0, 1, 2]).unwrap();
        let r = convergence_exponents(hp(0.5), 0.2, 1.0, Some(&m), ExponentMode::AppendixY).unwrap();
        let e = r.gap_exponents.unwrap();
        assert!((e[0] - 2.0).abs() < 1e-15);
        assert!((e[1] - 1.4).abs() < 1e-15);
        assert!((e[2] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn validation_and_parsing() {
        assert!(convergence_exponents(hp(0.3), -0.1, 1.0, None, ExponentMode::MainY).is_err());
        assert!(convergence_exponents(hp(0.3), 0.1, 0.0, None, ExponentMode::MainT).is_err());
        for m in ExponentMode::ALL {
            assert_eq!(m.tag().parse::<ExponentMode>().unwrap(), m);
        }
        assert!("main".parse::<ExponentMode>().is_err());
    }
}
