use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SiltError};
use crate::expectation::mean_alpha_prime_eps;
use crate::fbm::{FbmGenerator, HurstParameter, Synthesis};
use crate::mollifier::Mollifier;
use crate::silt::{grid_estimates, Region, YGrid};
use crate::stats::Summary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub y: f64,
    pub mean: f64,
    pub variance: f64,
    /// `multiplier * E[alpha_hat'_{t,eps}(y)]`
    pub subtracted: f64,
    pub renormalized_mean: f64,
    pub renormalized_variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSetup {
    pub hurst: HurstParameter,
    pub horizon: f64,
    pub n_steps: usize,
    /// Factor applied to the exact mean before subtraction.
    pub multiplier: f64,
}

/// Ensemble mean and variance of `alpha_hat'_eps(y)` on a symmetric grid,
/// raw and with the exact mean subtracted. Exploratory output only.
pub fn continuity_probe_at_zero(
    seeds: &[u64],
    setup: ProbeSetup,
    grid: YGrid,
    m: &Mollifier,
) -> Result<Vec<ProbeRow>> {
    let h = setup.hurst.value();
    if !(h > 0.5 && h < 2.0 / 3.0) {
        return Err(SiltError::domain("hurst", format!("{h} not in (1/2, 2/3)")));
    }
    for k in 0..grid.len {
        let (a, b) = (grid.point(k), grid.point(grid.len - 1 - k));
        if (a + b).abs() > 1e-12 * (a.abs() + b.abs()).max(1.0) {
            return Err(SiltError::domain("y_grid", "grid must be symmetric about 0"));
        }
    }
    if seeds.len() < 2 {
        return Err(SiltError::domain("seeds", "need at least 2 replicates"));
    }
    let generator = FbmGenerator::new(setup.hurst, setup.horizon, setup.n_steps, Synthesis::Auto)?;
    let region = Region::full_triangle(setup.horizon)?;
    let samples = seeds
        .par_iter()
        .map(|&s| grid_estimates(&generator.sample(s), grid, m, &region).map(|e| e.alpha_prime))
        .collect::<Result<Vec<_>>>()?;
    (0..grid.len)
        .map(|k| {
            let y = grid.point(k);
            let exact = mean_alpha_prime_eps(setup.horizon, y, m.epsilon(), setup.hurst)?.value;
            let subtracted = setup.multiplier * exact;
            let raw: Vec<f64> = samples.iter().map(|s| s[k]).collect();
            let centred: Vec<f64> = raw.iter().map(|v| v - subtracted).collect();
            let (a, b) = (Summary::of(&raw), Summary::of(&centred));
            Ok(ProbeRow {
                y,
                mean: a.mean,
                variance: a.variance,
                subtracted,
                renormalized_mean: b.mean,
                renormalized_variance: b.variance,
            })
        })
        .collect()
}
