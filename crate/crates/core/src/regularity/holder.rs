//! Empirical Hölder exponents from second-moment structure functions.
//!
//! This estimates a mean-square modulus, used as a proxy for the almost-sure
//! orders, which are strict upper thresholds rather than point values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SiltError};
use crate::fbm::{FbmGenerator, HurstParameter, Synthesis};
use crate::mollifier::Mollifier;
use crate::silt::{alpha_time_field, grid_estimates, Region, YGrid};
use crate::stats::linear_fit;

pub const MIN_POINTS: usize = 64;
pub const MIN_REPLICATES: usize = 32;
pub const MIN_LAGS: usize = 4;
pub const RELIABLE_R_SQUARED: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Space,
    Time,
    Joint,
}

impl std::str::FromStr for Axis {
    type Err = SiltError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "space" | "y" => Ok(Axis::Space),
            "time" | "t" => Ok(Axis::Time),
            "joint" => Ok(Axis::Joint),
            other => Err(SiltError::domain("axis", format!("unknown axis {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Alpha,
    AlphaHatPrime,
    /// `alpha_hat'(y, A)` over a region kept away from the diagonal.
    RegionRestricted,
}

/// Hölder order threshold for `(H, kind, axis)`.
pub fn theoretical_bound(hurst: HurstParameter, kind: ProcessKind, axis: Axis) -> f64 {
    let h = hurst.value();
    match (kind, axis) {
        (ProcessKind::Alpha, Axis::Space) => (1.0 / h - 1.0).min(1.0),
        (ProcessKind::Alpha, _) => 1.0 - h,
        (ProcessKind::AlphaHatPrime, Axis::Space) => (1.0 / h - 2.0).min(1.0),
        (ProcessKind::AlphaHatPrime, _) => 1.0 - 2.0 * h,
        (ProcessKind::RegionRestricted, Axis::Space) => 1.0 / h - 1.5,
        (ProcessKind::RegionRestricted, Axis::Time) => 1.0 - 1.5 * h,
        (ProcessKind::RegionRestricted, Axis::Joint) => (1.0 / h - 1.5).min(1.0 - 1.5 * h),
    }
}

/// Replicated samples of a process on a `(t, y)` grid; each replicate is
/// stored row-major, `t` outer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub hurst: HurstParameter,
    pub kind: ProcessKind,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub replicates: Vec<Vec<f64>>,
}

impl Field {
    fn spacing(v: &[f64]) -> f64 {
        if v.len() < 2 {
            0.0
        } else {
            v[1] - v[0]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub axis: Axis,
    pub kind: ProcessKind,
    pub estimated_exponent: f64,
    pub slope: f64,
    /// Physical lag lengths.
    pub regression_lags: Vec<f64>,
    /// Mean squared increment at each lag.
    pub structure: Vec<f64>,
    pub r_squared: f64,
    pub theoretical_bound: f64,
    pub reliable: bool,
}

impl HolderReport {
    /// `(log lag, log structure)` pairs.
    pub fn loglog(&self) -> Vec<(f64, f64)> {
        self.regression_lags
            .iter()
            .zip(&self.structure)
            .map(|(l, s)| (l.ln(), s.ln()))
            .collect()
    }
}

/// Dyadic lags `2, 4, ...` up to `len / 8`, extended down to 1 when fewer than
/// four fit.
fn dyadic_lags(len: usize) -> Vec<usize> {
    let mut lags = Vec::new();
    let mut l = 2;
    while l <= len / 8 {
        lags.push(l);
        l *= 2;
    }
    if lags.len() < MIN_LAGS {
        lags.insert(0, 1);
    }
    lags
}

pub fn holder_exponent_estimate(field: &Field, axis: Axis) -> Result<HolderReport> {
    let (nt, ny) = (field.t.len(), field.y.len());
    if field.replicates.len() < MIN_REPLICATES {
        return Err(SiltError::domain(
            "field",
            format!(
                "need >= {MIN_REPLICATES} replicates, got {}",
                field.replicates.len()
            ),
        ));
    }
    if field.replicates.iter().any(|r| r.len() != nt * ny) {
        return Err(SiltError::domain("field", "replicate size does not match the grid"));
    }
    let (len, spacing) = match axis {
        Axis::Time => (nt, Field::spacing(&field.t)),
        Axis::Space => (ny, Field::spacing(&field.y)),
        Axis::Joint => (nt.min(ny), Field::spacing(&field.t).max(Field::spacing(&field.y))),
    };
    let needs_t = matches!(axis, Axis::Time | Axis::Joint);
    let needs_y = matches!(axis, Axis::Space | Axis::Joint);
    if (needs_t && nt < MIN_POINTS) || (needs_y && ny < MIN_POINTS) {
        return Err(SiltError::domain(
            "field",
            format!("need >= {MIN_POINTS} points along the analysed axis"),
        ));
    }
    let lags = dyadic_lags(len);
    if lags.len() < MIN_LAGS {
        return Err(SiltError::domain("field", "fewer than 4 usable lags"));
    }

    let structure: Vec<f64> = lags
        .iter()
        .map(|&l| {
            let (dt, dy) = match axis {
                Axis::Time => (l, 0),
                Axis::Space => (0, l),
                Axis::Joint => (l, l),
            };
            let mut sum = 0.0;
            let mut count = 0usize;
            for rep in &field.replicates {
                for it in 0..nt - dt {
                    for iy in 0..ny - dy {
                        let a = rep[it * ny + iy];
                        let b = rep[(it + dt) * ny + iy + dy];
                        sum += (b - a) * (b - a);
                        count += 1;
                    }
                }
            }
            sum / count as f64
        })
        .collect();
    let regression_lags: Vec<f64> = lags.iter().map(|&l| l as f64 * spacing).collect();
    if structure.iter().any(|&s| !(s > 0.0)) {
        return Err(SiltError::domain("field", "field has zero increments at some lag"));
    }
    let xs: Vec<f64> = regression_lags.iter().map(|l| l.ln()).collect();
    let ys: Vec<f64> = structure.iter().map(|s| s.ln()).collect();
    let fit = linear_fit(&xs, &ys);
    Ok(HolderReport {
        axis,
        kind: field.kind,
        estimated_exponent: (fit.slope / 2.0).clamp(0.0, 1.0),
        slope: fit.slope,
        regression_lags,
        structure,
        r_squared: fit.r_squared,
        theoretical_bound: theoretical_bound(field.hurst, field.kind, axis),
        reliable: fit.r_squared >= RELIABLE_R_SQUARED,
    })
}

/// `alpha_eps` over `{0 < r < s < t_k}` for every grid time and every `y` in
/// `grid`, one replicate per seed.
pub fn simulate_alpha_time_field(
    hurst: HurstParameter,
    horizon: f64,
    n_steps: usize,
    grid: YGrid,
    m: &Mollifier,
    seeds: &[u64],
) -> Result<Field> {
    let generator = FbmGenerator::new(hurst, horizon, n_steps, Synthesis::Auto)?;
    let replicates = seeds
        .par_iter()
        .map(|&s| {
            let path = generator.sample(s);
            alpha_time_field(&path, grid, m).map(|rows| rows.concat())
        })
        .collect::<Result<Vec<_>>>()?;
    let dt = horizon / n_steps as f64;
    Ok(Field {
        hurst,
        kind: ProcessKind::Alpha,
        t: (0..=n_steps).map(|k| k as f64 * dt).collect(),
        y: grid.points(),
        replicates,
    })
}

/// `alpha_eps` or `alpha_hat'_eps` on a `y`-grid at the horizon, over `region`.
pub fn simulate_space_field(
    hurst: HurstParameter,
    kind: ProcessKind,
    horizon: f64,
    n_steps: usize,
    grid: YGrid,
    m: &Mollifier,
    region: &Region,
    seeds: &[u64],
) -> Result<Field> {
    let generator = FbmGenerator::new(hurst, horizon, n_steps, Synthesis::Auto)?;
    let replicates = seeds
        .par_iter()
        .map(|&s| {
            let path = generator.sample(s);
            grid_estimates(&path, grid, m, region).map(|e| match kind {
                ProcessKind::Alpha => e.alpha,
                _ => e.alpha_prime,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Field {
        hurst,
        kind,
        t: vec![horizon],
        y: grid.points(),
        replicates,
    })
}
