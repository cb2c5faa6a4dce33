use serde::{Deserialize, Serialize};

use super::{increment_covariance, HurstParameter};
use crate::error::{Result, SiltError};

/// Ordered endpoint times `l_1 <= ... <= l_{2n}` of an arc configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationTimes {
    times: Vec<f64>,
}

impl ConfigurationTimes {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.len() % 2 != 0 {
            return Err(SiltError::domain(
                "times",
                format!("need an even number (>= 2) of times, got {}", times.len()),
            ));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(SiltError::domain("times", "times must be finite and >= 0"));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(SiltError::domain("times", "times must be nondecreasing"));
        }
        Ok(ConfigurationTimes { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of arcs `n`.
    pub fn arcs(&self) -> usize {
        self.times.len() / 2
    }

    /// `a_j = l_{j+1} - l_j`, length `2n - 1`.
    pub fn gaps(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

fn check_weights(times: &ConfigurationTimes, weights: &[f64]) -> Result<()> {
    if weights.len() != times.times.len() - 1 {
        return Err(SiltError::domain(
            "weights",
            format!(
                "expected {} weights for {} times, got {}",
                times.times.len() - 1,
                times.times.len(),
                weights.len()
            ),
        ));
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(SiltError::domain("weights", "non-finite weight"));
    }
    Ok(())
}

/// `Var(sum_j u_j (B_{l_{j+1}} - B_{l_j}))` from the exact covariance.
fn combination_variance(times: &ConfigurationTimes, weights: &[f64], hurst: HurstParameter) -> f64 {
    let t = &times.times;
    let two_h = hurst.twice();
    let mut var = 0.0;
    for (j, &uj) in weights.iter().enumerate() {
        if uj == 0.0 {
            continue;
        }
        for (k, &uk) in weights.iter().enumerate() {
            if uk == 0.0 {
                continue;
            }
            var += uj * uk * increment_covariance(t[j], t[j + 1], t[k], t[k + 1], two_h);
        }
    }
    var.max(0.0)
}

/// `E[exp(i sum_j u_j (B_{l_{j+1}} - B_{l_j}))] = exp(-Var/2)`.
pub fn characteristic_functional(
    times: &ConfigurationTimes,
    weights: &[f64],
    hurst: HurstParameter,
) -> Result<f64> {
    check_weights(times, weights)?;
    Ok((-0.5 * combination_variance(times, weights, hurst)).exp())
}

/// Ratio of the increment-combination variance to `sum_j u_j^2 a_j^{2H}`.
///
/// Local nondeterminism bounds this below by a positive constant depending on
/// `H` and `n`; the value is reported, not asserted.
pub fn lnd_ratio(
    times: &ConfigurationTimes,
    weights: &[f64],
    hurst: HurstParameter,
) -> Result<f64> {
    check_weights(times, weights)?;
    if weights.iter().all(|&w| w == 0.0) {
        return Err(SiltError::domain("weights", "all weights are zero"));
    }
    let gaps = times.gaps();
    if gaps.iter().any(|&a| a <= 0.0) {
        return Err(SiltError::domain("times", "ratio undefined for a zero gap"));
    }
    let two_h = hurst.twice();
    let denom: f64 = weights
        .iter()
        .zip(&gaps)
        .map(|(u, a)| u * u * a.powf(two_h))
        .sum();
    Ok(combination_variance(times, weights, hurst) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(v: f64) -> HurstParameter {
        HurstParameter::new(v).unwrap()
    }

    #[test]
    fn zero_weights_give_one() {
        let t = ConfigurationTimes::new(vec![0.1, 0.2, 0.5, 0.9]).unwrap();
        assert_eq!(characteristic_functional(&t, &[0.0; 3], h(0.3)).unwrap(), 1.0);
    }

    #[test]
    fn single_increment() {
        let t = ConfigurationTimes::new(vec![0.2, 0.7]).unwrap();
        let u = 1.3;
        let got = characteristic_functional(&t, &[u], h(0.35)).unwrap();
        let want = (-0.5 * u * u * 0.5f64.powf(0.7)).exp();
        assert!((got - want).abs() < 1e-15);
        assert!((lnd_ratio(&t, &[u], h(0.35)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_nonzero_among_many_is_exact() {
        let t = ConfigurationTimes::new(vec![0.0, 0.3, 0.35, 0.8]).unwrap();
        let r = lnd_ratio(&t, &[0.0, 2.0, 0.0], h(0.8)).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn brownian_ratio_is_one() {
        let t = ConfigurationTimes::new(vec![0.0, 0.1, 0.25, 0.3, 0.6, 1.0]).unwrap();
        let r = lnd_ratio(&t, &[1.0, -2.0, 0.5, 3.0, -1.0], h(0.5)).unwrap();
        assert!((r - 1.0).abs() < 1e-13, "{r}");
    }

    #[test]
    fn bad_inputs() {
        assert!(ConfigurationTimes::new(vec![0.1, 0.2, 0.3]).is_err());
        assert!(ConfigurationTimes::new(vec![0.3, 0.2]).is_err());
        let t = ConfigurationTimes::new(vec![0.1, 0.1, 0.2, 0.3]).unwrap();
        assert!(lnd_ratio(&t, &[1.0, 1.0, 1.0], h(0.3)).is_err());
        let t = ConfigurationTimes::new(vec![0.1, 0.2]).unwrap();
        assert!(lnd_ratio(&t, &[0.0], h(0.3)).is_err());
        assert!(characteristic_functional(&t, &[1.0, 2.0], h(0.3)).is_err());
    }
}
