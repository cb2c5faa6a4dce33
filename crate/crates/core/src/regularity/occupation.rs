//! Time-side versus space-side evaluations of the occupation identities
//! `sum w g(B_s - B_r) = int g(y) alpha(y) dy` and
//! `sum w g'(B_s - B_r) = -int g(y) alpha_hat'(y) dy`.

use serde::{Deserialize, Serialize};

use super::TestFunction;
use crate::error::{Result, SiltError};
use crate::fbm::FbmPath;
use crate::mollifier::Mollifier;
use crate::silt::{grid_estimates, pair_integral, Region, YGrid};
use crate::stats::trapezoid;

/// Mass fraction allowed to fall outside the `y`-grid.
const MAX_LEAKAGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupationCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / (|lhs| + 1e-12)`
    pub residual: f64,
    /// Bound on the fraction of mollifier mass outside the grid.
    pub leakage: f64,
}

impl OccupationCheck {
    fn new(lhs: f64, rhs: f64, leakage: f64) -> Self {
        OccupationCheck {
            lhs,
            rhs,
            residual: (lhs - rhs).abs() / (lhs.abs() + 1e-12),
            leakage,
        }
    }
}

/// Smallest and largest `B_{t_j} - B_{t_i}` over `i < j`.
pub(crate) fn increment_range(path: &FbmPath) -> (f64, f64) {
    let v = path.values();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut run_min, mut run_max) = (v[0], v[0]);
    for &x in &v[1..] {
        hi = hi.max(x - run_min);
        lo = lo.min(x - run_max);
        run_min = run_min.min(x);
        run_max = run_max.max(x);
    }
    (lo, hi)
}

/// Gaussian tail bound for the mass of `f_eps(d - .)` outside the grid,
/// maximized over all increments `d`.
fn leakage(path: &FbmPath, grid: &YGrid, m: &Mollifier) -> f64 {
    let (lo, hi) = increment_range(path);
    let gap = (lo - grid.start).min(grid.end() - hi);
    if gap <= 0.0 {
        return 1.0;
    }
    (-0.5 * gap * gap / m.epsilon()).exp()
}

fn check_coverage(path: &FbmPath, grid: &YGrid, m: &Mollifier) -> Result<f64> {
    let leak = leakage(path, grid, m);
    if leak > MAX_LEAKAGE {
        let (lo, hi) = increment_range(path);
        return Err(SiltError::domain(
            "y_grid",
            format!(
                "[{}, {}] does not cover increments [{lo}, {hi}] with padding; estimated leakage {leak:e}",
                grid.start,
                grid.end()
            ),
        ));
    }
    Ok(leak)
}

/// A grid of step `sqrt(eps)/2` covering the path increments padded by `20 sqrt(eps)`.
///
/// The integrands are sums of Gaussians of width `sqrt(eps)`, so the trapezoid
/// rule at this step is already accurate to rounding.
pub fn covering_grid(path: &FbmPath, m: &Mollifier) -> Result<YGrid> {
    let (lo, hi) = increment_range(path);
    let s = m.epsilon().sqrt();
    let pad = 20.0 * s;
    let step = s / 2.0;
    let len = ((hi - lo + 2.0 * pad) / step).ceil() as usize + 1;
    YGrid::new(lo - pad, step, len)
}

pub fn occupation_check_alpha(
    path: &FbmPath,
    g: &TestFunction,
    grid: YGrid,
    m: &Mollifier,
    region: &Region,
) -> Result<OccupationCheck> {
    occupation_checks(path, std::slice::from_ref(g), grid, m, region, false).map(|mut v| v.remove(0))
}

pub fn occupation_check_derivative(
    path: &FbmPath,
    g: &TestFunction,
    grid: YGrid,
    m: &Mollifier,
    region: &Region,
) -> Result<OccupationCheck> {
    occupation_checks(path, std::slice::from_ref(g), grid, m, region, true).map(|mut v| v.remove(0))
}

/// Several test functions against one grid evaluation. With `derivative` set
/// this is the `alpha_hat'` identity, otherwise the `alpha` one.
pub fn occupation_checks(
    path: &FbmPath,
    gs: &[TestFunction],
    grid: YGrid,
    m: &Mollifier,
    region: &Region,
    derivative: bool,
) -> Result<Vec<OccupationCheck>> {
    let leak = check_coverage(path, &grid, m)?;
    let est = grid_estimates(path, grid, m, region)?;
    let field = if derivative { &est.alpha_prime } else { &est.alpha };
    gs.iter()
        .map(|g| {
            let lhs = if derivative {
                pair_integral(path, region, |d| g.derivative(d))?
            } else {
                pair_integral(path, region, |d| g.value(d))?
            };
            let integrand: Vec<f64> = est.y.iter().zip(field).map(|(&y, &a)| g.value(y) * a).collect();
            let rhs = trapezoid(&integrand, grid.step);
            Ok(OccupationCheck::new(lhs, if derivative { -rhs } else { rhs }, leak))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeConsistency {
    pub max_abs_discrepancy: f64,
    pub max_abs_alpha_prime: f64,
    pub step: f64,
}

/// Largest gap between the central difference of `alpha_eps` and
/// `alpha_hat'_eps` over the interior grid points.
pub fn derivative_consistency(
    path: &FbmPath,
    grid: YGrid,
    m: &Mollifier,
    region: &Region,
) -> Result<DerivativeConsistency> {
    if grid.len < 3 {
        return Err(SiltError::domain("y_grid", "need at least 3 points"));
    }
    let est = grid_estimates(path, grid, m, region)?;
    let h = grid.step;
    let mut worst = 0.0f64;
    for k in 1..grid.len - 1 {
        let fd = (est.alpha[k + 1] - est.alpha[k - 1]) / (2.0 * h);
        worst = worst.max((fd - est.alpha_prime[k]).abs());
    }
    let scale = est.alpha_prime[1..grid.len - 1]
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(DerivativeConsistency {
        max_abs_discrepancy: worst,
        max_abs_alpha_prime: scale,
        step: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{generate_path, HurstParameter};

    fn path(h: f64, n: usize, seed: u64) -> FbmPath {
        generate_path(HurstParameter::new(h).unwrap(), 1.0, n, seed).unwrap()
    }

    #[test]
    fn increment_range_brute_force() {
        let p = path(0.3, 120, 2);
        let v = p.values();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                lo = lo.min(v[j] - v[i]);
                hi = hi.max(v[j] - v[i]);
            }
        }
        assert_eq!(increment_range(&p), (lo, hi));
    }

    #[test]
    fn constant_test_function_gives_area() {
        let p = path(0.4, 256, 3);
        let m = Mollifier::new(0.01).unwrap();
        let d = Region::full_triangle(1.0).unwrap();
        let g = TestFunction::constant_one();
        let grid = covering_grid(&p, &m).unwrap();
        let c = occupation_check_alpha(&p, &g, grid, &m, &d).unwrap();
        assert!((c.lhs - 0.5).abs() < 1e-14);
        assert!(c.residual < 1e-3);
        let c = occupation_check_derivative(&p, &g, grid, &m, &d).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.rhs.abs() < 1e-3);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let p = path(0.4, 64, 3);
        let m = Mollifier::new(0.01).unwrap();
        let d = Region::full_triangle(1.0).unwrap();
        let grid = YGrid::new(-0.1, 0.01, 21).unwrap();
        let e = occupation_check_alpha(&p, &TestFunction::constant_one(), grid, &m, &d);
        assert!(matches!(e, Err(SiltError::Domain { .. })));
    }

    #[test]
    fn single_pair_discrepancy_is_second_order() {
        // Two steps on [0, 1]: all weight sits on three increments.
        let hp = HurstParameter::new(0.5).unwrap();
        let p = FbmPath::from_samples(hp, 1.0, 0, vec![0.0, 0.3, 0.1]).unwrap();
        let m = Mollifier::new(0.05).unwrap();
        let d = Region::full_triangle(1.0).unwrap();
        let a = derivative_consistency(&p, YGrid::new(-0.5, 0.01, 101).unwrap(), &m, &d).unwrap();
        let b = derivative_consistency(&p, YGrid::new(-0.5, 0.005, 201).unwrap(), &m, &d).unwrap();
        let ratio = a.max_abs_discrepancy / b.max_abs_discrepancy;
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }
}
