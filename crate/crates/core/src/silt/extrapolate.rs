use super::estimator::SiltEstimate;
use crate::error::{Result, SiltError};

/// Extrapolates estimates on a geometric `eps`-ladder to `eps = 0`.
///
/// The record is `converged` when successive differences are nonincreasing in
/// magnitude; the value is then the Aitken delta-squared limit of the last three
/// estimates (exact for `L + c q^k`). Otherwise the finest estimate is returned.
pub fn epsilon_extrapolate(estimates: &[SiltEstimate]) -> Result<SiltEstimate> {
    if estimates.len() < 3 {
        return Err(SiltError::domain(
            "estimates",
            format!("need at least 3 estimates, got {}", estimates.len()),
        ));
    }
    let first = &estimates[0];
    for e in estimates {
        if e.kind != first.kind
            || e.y != first.y
            || e.region != first.region
            || e.seed != first.seed
            || e.n_steps != first.n_steps
            || e.hurst != first.hurst
            || e.horizon != first.horizon
        {
            return Err(SiltError::domain(
                "estimates",
                "ladder mixes paths, kinds, y values or regions",
            ));
        }
        if !(e.epsilon > 0.0) {
            return Err(SiltError::domain("estimates", "ladder entries need eps > 0"));
        }
    }
    let ratio = estimates[1].epsilon / first.epsilon;
    if !(ratio < 1.0) {
        return Err(SiltError::domain("estimates", "eps must decrease along the ladder"));
    }
    for w in estimates.windows(2) {
        let r = w[1].epsilon / w[0].epsilon;
        if (r - ratio).abs() > 1e-9 * ratio {
            return Err(SiltError::domain("estimates", "eps ladder is not geometric"));
        }
    }

    let v: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let diffs: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let converged = diffs.windows(2).all(|d| d[1].abs() <= d[0].abs());
    let last = *v.last().expect("len >= 3");
    let value = if converged {
        let (d1, d2) = (diffs[diffs.len() - 2], diffs[diffs.len() - 1]);
        let denom = d2 - d1;
        if denom == 0.0 || d2 == 0.0 {
            last
        } else {
            last - d2 * d2 / denom
        }
    } else {
        last
    };
    let mut out = estimates.last().expect("len >= 3").clone();
    out.epsilon = 0.0;
    out.value = value;
    out.converged = Some(converged);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::silt::{EstimatorKind, Region};

    fn ladder(values: &[f64]) -> Vec<SiltEstimate> {
        values
            .iter()
            .enumerate()
            .map(|(k, &value)| SiltEstimate {
                kind: EstimatorKind::Alpha,
                hurst: 0.3,
                horizon: 1.0,
                y: 0.5,
                epsilon: 0.04 / (1u32 << k) as f64,
                region: Region::full_triangle(1.0).unwrap(),
                value,
                n_steps: 1024,
                seed: 1,
                converged: None,
                warning: None,
            })
            .collect()
    }

    #[test]
    fn constant_sequence() {
        let r = epsilon_extrapolate(&ladder(&[2.5; 4])).unwrap();
        assert_eq!(r.value, 2.5);
        assert_eq!(r.converged, Some(true));
        assert_eq!(r.epsilon, 0.0);
    }

    #[test]
    fn geometric_sequence_is_exact() {
        let v: Vec<f64> = (0..5).map(|k| 1.25 + 0.7 * 0.5f64.powi(k)).collect();
        let r = epsilon_extrapolate(&ladder(&v)).unwrap();
        assert!((r.value - 1.25).abs() < 1e-10);
        assert_eq!(r.converged, Some(true));
    }

    #[test]
    fn oscillating_is_flagged() {
        let r = epsilon_extrapolate(&ladder(&[1.0, 1.1, 0.9, 1.3])).unwrap();
        assert_eq!(r.converged, Some(false));
        assert_eq!(r.value, 1.3);
    }

    #[test]
    fn rejects_bad_ladders() {
        assert!(epsilon_extrapolate(&ladder(&[1.0, 2.0])).is_err());
        let mut l = ladder(&[1.0, 2.0, 3.0]);
        l[2].epsilon = 0.001;
        assert!(epsilon_extrapolate(&l).is_err());
        let mut l = ladder(&[1.0, 2.0, 3.0]);
        l[1].y = 0.4;
        assert!(epsilon_extrapolate(&l).is_err());
    }
}
