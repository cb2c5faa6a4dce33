//! Estimators evaluated on a whole uniform `y`-grid in one pass over the pairs.
//!
//! Along the grid the Gaussian factors obey `e_{k+1} = e_k r_k`,
//! `r_{k+1} = r_k q`, `q = exp(-h^2/eps)`, so each pair costs a few
//! multiplications per grid point inside its window. The recurrence is
//! re-anchored with a fresh `exp` every [`ANCHOR`] points.

use serde::{Deserialize, Serialize};

use super::estimator::check_path;
use super::pairs::visit_rows;
use super::region::Region;
use crate::error::{Result, SiltError};
use crate::fbm::FbmPath;
use crate::mollifier::Mollifier;

const ANCHOR: usize = 32;

/// Terms below `exp(-WINDOW_EXPONENT)` relative to the peak are skipped.
const WINDOW_EXPONENT: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl YGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<YGrid> {
        if !(start.is_finite() && step > 0.0 && step.is_finite()) {
            return Err(SiltError::domain("y_grid", "start must be finite and step > 0"));
        }
        if len < 2 {
            return Err(SiltError::domain("y_grid", "need at least 2 points"));
        }
        Ok(YGrid { start, step, len })
    }

    /// `len` points from `lo` to `hi` inclusive.
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Result<YGrid> {
        if !(hi > lo) || len < 2 {
            return Err(SiltError::domain("y_grid", "need hi > lo and len >= 2"));
        }
        YGrid::new(lo, (hi - lo) / (len - 1) as f64, len)
    }

    /// Step `step`, symmetric about 0, reaching at least `radius`.
    pub fn symmetric(radius: f64, step: f64) -> Result<YGrid> {
        let half = (radius / step).ceil() as usize;
        YGrid::new(-(half as f64) * step, step, 2 * half + 1)
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.start + self.step * k as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.point(k)).collect()
    }

    pub fn end(&self) -> f64 {
        self.point(self.len - 1)
    }
}

pub(crate) struct GaussianWindow {
    grid: YGrid,
    eps: f64,
    norm: f64,
    cut: f64,
    q: f64,
    anchor: usize,
}

impl GaussianWindow {
    pub(crate) fn new(grid: YGrid, m: &Mollifier) -> GaussianWindow {
        let eps = m.epsilon();
        let h = grid.step;
        let ratio = h * h / eps;
        GaussianWindow {
            grid,
            eps,
            norm: m.density(0.0),
            cut: (2.0 * WINDOW_EXPONENT * eps).sqrt(),
            q: (-ratio).exp(),
            // A coarse grid makes the step ratios overflow; evaluate directly.
            anchor: if ratio > 1.0 { 1 } else { ANCHOR },
        }
    }

    /// Adds `w f(d - y_k)` to `a[k]` and `w * -f'(d - y_k)` to `ap[k]`.
    #[inline]
    pub(crate) fn add(&self, d: f64, w: f64, a: &mut [f64], ap: Option<&mut [f64]>) {
        let g = &self.grid;
        let lo = ((d - self.cut - g.start) / g.step).ceil();
        let hi = ((d + self.cut - g.start) / g.step).floor();
        if hi < 0.0 || lo > (g.len - 1) as f64 {
            return;
        }
        let lo = lo.max(0.0) as usize;
        let hi = (hi as usize).min(g.len - 1);
        if lo > hi {
            return;
        }
        let inv = 1.0 / self.eps;
        let h = g.step;
        let scale = w * self.norm;
        let mut ap = ap;
        let mut k = lo;
        while k <= hi {
            let x0 = d - g.point(k);
            let mut e = scale * (-0.5 * x0 * x0 * inv).exp();
            let mut r = ((x0 * h - 0.5 * h * h) * inv).exp();
            let end = (k + self.anchor).min(hi + 1);
            match ap.as_deref_mut() {
                Some(ap) => {
                    for kk in k..end {
                        a[kk] += e;
                        ap[kk] += e * (d - g.point(kk)) * inv;
                        e *= r;
                        r *= self.q;
                    }
                }
                None => {
                    for v in &mut a[k..end] {
                        *v += e;
                        e *= r;
                        r *= self.q;
                    }
                }
            }
            k = end;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEstimates {
    pub y: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_prime: Vec<f64>,
}

/// `alpha_eps` and `alpha_hat'_eps` at every grid point.
pub fn grid_estimates(
    path: &FbmPath,
    grid: YGrid,
    m: &Mollifier,
    region: &Region,
) -> Result<GridEstimates> {
    check_path(path, region)?;
    let win = GaussianWindow::new(grid, m);
    let v = path.values();
    let mut alpha = vec![0.0; grid.len];
    let mut alpha_prime = vec![0.0; grid.len];
    visit_rows(path.n_steps(), path.step(), region, |i, clean, cw, extras| {
        let vi = v[i];
        for j in clean {
            win.add(v[j] - vi, cw, &mut alpha, Some(&mut alpha_prime));
        }
        for &(j, w) in extras {
            win.add(v[j] - vi, w, &mut alpha, Some(&mut alpha_prime));
        }
    });
    Ok(GridEstimates {
        y: grid.points(),
        alpha,
        alpha_prime,
    })
}

/// `alpha_eps` over `D_{t_k} = {0 < r < s < t_k}` for every grid time `t_k`,
/// each equal to the full-triangle estimate on the path truncated at step `k`.
/// Row `k` holds the values on `grid`; row 0 is zero.
pub fn alpha_time_field(path: &FbmPath, grid: YGrid, m: &Mollifier) -> Result<Vec<Vec<f64>>> {
    if path.n_steps() < 2 {
        return Err(SiltError::domain("path", "need at least 2 steps"));
    }
    let n = path.n_steps();
    let dt = path.step();
    let dt2 = dt * dt;
    let v = path.values();
    let win = GaussianWindow::new(grid, m);
    let len = grid.len;

    // With interior cells of width dt and half cells at both ends of [0, t_k]:
    //   alpha_k = sum_{j<k} C_j + C_k / 2 + lumps,  C_j = dt^2 (sum_{0<i<j} f_ij + f_0j / 2),
    // and the diagonal lumps put 3dt^2/8 on the two end pairs, dt^2/2 on inner adjacent pairs.
    let mut field = vec![vec![0.0; len]; n + 1];
    let mut adjacent = vec![vec![0.0; len]; n];
    for (i, row) in adjacent.iter_mut().enumerate() {
        win.add(v[i + 1] - v[i], 1.0, row, None);
    }
    let mut cumulative = vec![0.0; len];
    let mut inner_adjacent = vec![0.0; len];
    let mut col = vec![0.0; len];
    field[1]
        .iter_mut()
        .zip(&adjacent[0])
        .for_each(|(f, p)| *f = 0.5 * dt2 * p);
    for k in 1..=n {
        col.iter_mut().for_each(|c| *c = 0.0);
        win.add(v[k] - v[0], 0.5 * dt2, &mut col, None);
        for i in 1..k {
            win.add(v[k] - v[i], dt2, &mut col, None);
        }
        if k >= 2 {
            if k >= 3 {
                inner_adjacent
                    .iter_mut()
                    .zip(&adjacent[k - 2])
                    .for_each(|(s, p)| *s += p);
            }
            let out = &mut field[k];
            for y in 0..len {
                out[y] = cumulative[y]
                    + 0.5 * col[y]
                    + 0.375 * dt2 * (adjacent[0][y] + adjacent[k - 1][y])
                    + 0.5 * dt2 * inner_adjacent[y];
            }
        }
        cumulative.iter_mut().zip(&col).for_each(|(s, c)| *s += c);
    }
    Ok(field)
}
