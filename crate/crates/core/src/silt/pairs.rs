//! Quadrature weights for sums over grid pairs `(i, j)`, `i < j`, approximating
//! integrals over a region of the `(r, s)` plane.
//!
//! Grid time `t_i` owns the dual cell `I_i = [t_i - dt/2, t_i + dt/2] ∩ [0, T]`.
//! Pair `(i, j)` gets the area of `I_i x I_j` inside the region. The cells
//! `I_i x I_i` straddle the diagonal, where no pair lives; their area inside the
//! region is moved onto the neighbouring pairs `(i-1, i)` and `(i, i+1)` (all of
//! it onto the single neighbour at either end). The weights therefore sum to the
//! region's area exactly and nothing is evaluated at `s = r`.

use std::ops::Range;

use super::region::{clipped_area, Region};

pub(crate) struct Cells {
    n: usize,
    dt: f64,
    horizon: f64,
}

impl Cells {
    pub(crate) fn new(n: usize, dt: f64) -> Cells {
        Cells {
            n,
            dt,
            horizon: dt * n as f64,
        }
    }

    #[inline]
    fn lo(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            (i as f64 - 0.5) * self.dt
        }
    }

    #[inline]
    fn hi(&self, i: usize) -> f64 {
        if i == self.n {
            self.horizon
        } else {
            (i as f64 + 0.5) * self.dt
        }
    }

    /// Indices whose cells may meet `[lo, hi]` (a superset).
    fn span(&self, lo: f64, hi: f64) -> Range<usize> {
        let a = ((lo / self.dt - 0.5).floor().max(0.0) as usize).min(self.n);
        let b = ((hi / self.dt + 0.5).ceil().max(0.0) as usize).min(self.n);
        a..b + 1
    }
}

/// Calls `row(i, clean, clean_weight, extras)` for every row with weight. Pairs
/// `(i, j)` for `j` in `clean` all carry `clean_weight`; `extras` lists the
/// remaining `(j, weight)` pairs of the row. Rows may repeat across rectangles.
pub(crate) fn visit_rows(
    n: usize,
    dt: f64,
    region: &Region,
    mut row: impl FnMut(usize, Range<usize>, f64, &[(usize, f64)]),
) {
    let cells = Cells::new(n, dt);
    let kappa = region.offset();
    let mut extras: Vec<(usize, f64)> = Vec::new();
    let mut lumps = vec![0.0; n];
    for p in region.pieces() {
        let rows = cells.span(p.r_lo, p.r_hi);
        let cols = cells.span(p.s_lo, p.s_hi);

        lumps.iter_mut().for_each(|x| *x = 0.0);
        let diag = rows.start.max(cols.start)..rows.end.min(cols.end);
        for i in diag.clone() {
            let a = clipped_area(
                cells.lo(i).max(p.r_lo),
                cells.hi(i).min(p.r_hi),
                cells.lo(i).max(p.s_lo),
                cells.hi(i).min(p.s_hi),
                kappa,
            );
            if a == 0.0 {
                continue;
            }
            if i == 0 {
                lumps[0] += a;
            } else if i == n {
                lumps[n - 1] += a;
            } else {
                lumps[i - 1] += 0.5 * a;
                lumps[i] += 0.5 * a;
            }
        }

        let first = rows.start.min(diag.start.saturating_sub(1));
        let last = rows.end.max(diag.end).min(n);
        for i in first..last {
            extras.clear();
            if lumps[i] != 0.0 {
                extras.push((i + 1, lumps[i]));
            }
            let (ci_lo, ci_hi) = (cells.lo(i), cells.hi(i));
            let mut clean = 0..0;
            let mut clean_weight = 0.0;
            if rows.contains(&i) {
                let j_first = cols.start.max(i + 1);
                let clean_row = ci_lo >= p.r_lo && ci_hi <= p.r_hi;
                if clean_row && j_first < cols.end {
                    // Interior cells (width dt) fully inside the rectangle and above the offset line.
                    let floor = p.s_lo.max(ci_hi + kappa);
                    let mut a = j_first.max(1);
                    while a < n && cells.lo(a) < floor {
                        a += 1;
                    }
                    let mut b = cols.end.min(n);
                    while b > a && cells.hi(b - 1) > p.s_hi {
                        b -= 1;
                    }
                    if a < b {
                        clean = a..b;
                        clean_weight = (ci_hi - ci_lo) * dt;
                    }
                }
                let (skip_lo, skip_hi) = if clean.is_empty() {
                    (cols.end, cols.end)
                } else {
                    (clean.start, clean.end)
                };
                for j in (j_first..skip_lo.max(j_first)).chain(skip_hi.max(j_first)..cols.end) {
                    let w = clipped_area(
                        ci_lo.max(p.r_lo),
                        ci_hi.min(p.r_hi),
                        cells.lo(j).max(p.s_lo),
                        cells.hi(j).min(p.s_hi),
                        kappa,
                    );
                    if w > 0.0 {
                        extras.push((j, w));
                    }
                }
            }
            if !clean.is_empty() || !extras.is_empty() {
                row(i, clean, clean_weight, &extras);
            }
        }
    }
}
