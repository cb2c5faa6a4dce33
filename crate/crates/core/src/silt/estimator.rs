use serde::{Deserialize, Serialize};

use super::pairs::visit_rows;
use super::region::Region;
use crate::error::{Result, SiltError};
use crate::fbm::FbmPath;
use crate::mollifier::Mollifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// `alpha_eps`: kernel `f_eps(B_s - B_r - y)`.
    Alpha,
    /// `alpha_hat'_eps`: kernel `-f'_eps(B_s - B_r - y)`.
    AlphaHatPrime,
    /// `alpha_tilde'_eps`: kernel `-f'_eps(B_s - B_r - y) (s - r)^{2H-1}`.
    AlphaTildePrime,
}

impl EstimatorKind {
    pub fn tag(self) -> &'static str {
        match self {
            EstimatorKind::Alpha => "alpha",
            EstimatorKind::AlphaHatPrime => "alpha_hat_prime",
            EstimatorKind::AlphaTildePrime => "alpha_tilde_prime",
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = SiltError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(EstimatorKind::Alpha),
            "alpha_hat_prime" | "alpha_prime" => Ok(EstimatorKind::AlphaHatPrime),
            "alpha_tilde_prime" => Ok(EstimatorKind::AlphaTildePrime),
            other => Err(SiltError::domain("kind", format!("unknown estimator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiltEstimate {
    pub kind: EstimatorKind,
    pub hurst: f64,
    pub horizon: f64,
    pub y: f64,
    /// 0 marks an extrapolated record.
    pub epsilon: f64,
    pub region: Region,
    pub value: f64,
    pub n_steps: usize,
    pub seed: u64,
    /// Set only on extrapolated records.
    pub converged: Option<bool>,
    pub warning: Option<String>,
}

pub(crate) fn check_path(path: &FbmPath, region: &Region) -> Result<()> {
    if path.n_steps() < 2 {
        return Err(SiltError::domain("path", "need at least 2 steps"));
    }
    region.check_within(path.horizon())
}

/// `sum_{i<j} w_ij k(B_{t_j} - B_{t_i}, j - i)` with the region's pair weights.
pub(crate) fn weighted_pair_sum(
    path: &FbmPath,
    region: &Region,
    kernel: impl Fn(f64, usize) -> f64,
) -> f64 {
    let v = path.values();
    let mut total = 0.0;
    visit_rows(path.n_steps(), path.step(), region, |i, clean, cw, extras| {
        let vi = v[i];
        let mut s = 0.0;
        for j in clean {
            s += kernel(v[j] - vi, j - i);
        }
        let mut row = cw * s;
        for &(j, w) in extras {
            row += w * kernel(v[j] - vi, j - i);
        }
        total += row;
    });
    total
}

/// `sum_{i<j} w_ij g(B_{t_j} - B_{t_i})` over a region; the time side of the
/// occupation identities.
pub fn pair_integral(path: &FbmPath, region: &Region, g: impl Fn(f64) -> f64) -> Result<f64> {
    check_path(path, region)?;
    Ok(weighted_pair_sum(path, region, |d, _| g(d)))
}

fn record(
    kind: EstimatorKind,
    path: &FbmPath,
    y: f64,
    m: &Mollifier,
    region: &Region,
    value: f64,
) -> SiltEstimate {
    let h = path.hurst().value();
    let warning = (kind == EstimatorKind::AlphaTildePrime && h >= 2.0 / 3.0)
        .then(|| format!("H = {h} >= 2/3: the eps -> 0 limit is not expected to exist"));
    SiltEstimate {
        kind,
        hurst: h,
        horizon: path.horizon(),
        y,
        epsilon: m.epsilon(),
        region: region.clone(),
        value,
        n_steps: path.n_steps(),
        seed: path.seed(),
        converged: None,
        warning,
    }
}

/// Evaluates any estimator kind over any region.
pub fn estimate(
    kind: EstimatorKind,
    path: &FbmPath,
    y: f64,
    m: &Mollifier,
    region: &Region,
) -> Result<SiltEstimate> {
    check_path(path, region)?;
    if !y.is_finite() {
        return Err(SiltError::domain("y", format!("{y} must be finite")));
    }
    let value = match kind {
        EstimatorKind::Alpha => weighted_pair_sum(path, region, |d, _| m.density(d - y)),
        EstimatorKind::AlphaHatPrime => {
            weighted_pair_sum(path, region, |d, _| -m.derivative(d - y))
        }
        EstimatorKind::AlphaTildePrime => {
            let dt = path.step();
            let expo = path.hurst().twice() - 1.0;
            let lag: Vec<f64> = (0..=path.n_steps())
                .map(|k| (k as f64 * dt).powf(expo))
                .collect();
            weighted_pair_sum(path, region, |d, k| -m.derivative(d - y) * lag[k])
        }
    };
    Ok(record(kind, path, y, m, region, value))
}

pub fn alpha_eps(path: &FbmPath, y: f64, m: &Mollifier, region: &Region) -> Result<SiltEstimate> {
    estimate(EstimatorKind::Alpha, path, y, m, region)
}

pub fn alpha_prime_eps(
    path: &FbmPath,
    y: f64,
    m: &Mollifier,
    region: &Region,
) -> Result<SiltEstimate> {
    estimate(EstimatorKind::AlphaHatPrime, path, y, m, region)
}

/// Over the full triangle; a warning is attached when `H >= 2/3`.
pub fn alpha_tilde_prime_eps(path: &FbmPath, y: f64, m: &Mollifier) -> Result<SiltEstimate> {
    let d = Region::full_triangle(path.horizon())?;
    estimate(EstimatorKind::AlphaTildePrime, path, y, m, &d)
}

/// `alpha_hat'_eps(y)` over the full triangle minus a caller-supplied mean.
pub fn renormalized_alpha_prime(
    path: &FbmPath,
    y: f64,
    m: &Mollifier,
    oracle_mean: f64,
) -> Result<f64> {
    let d = Region::full_triangle(path.horizon())?;
    Ok(alpha_prime_eps(path, y, m, &d)?.value - oracle_mean)
}

/// `{0.04, 0.02, 0.01, 0.005} * t^{2H}`.
pub fn default_epsilon_ladder(hurst: f64, t: f64) -> [f64; 4] {
    let scale = t.powf(2.0 * hurst);
    [0.04 * scale, 0.02 * scale, 0.01 * scale, 0.005 * scale]
}
