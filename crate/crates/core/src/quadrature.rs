//! Globally adaptive 21-point Gauss–Kronrod quadrature over a set of pieces.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Result, SiltError};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[10] * fc;
    let mut g = 0.0;
    for i in 0..10 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrates `f` over the consecutive pieces `[b_0, b_1], [b_1, b_2], ...`,
/// always bisecting the piece with the largest error estimate.
pub fn integrate_pieces(
    f: impl Fn(f64) -> f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<QuadResult> {
    if breakpoints.len() < 2 {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let (value, error) = kronrod21(&f, w[0], w[1]);
            heap.push(Piece {
                a: w[0],
                b: w[1],
                value,
                error,
            });
        }
    }
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let requested = tol.abs.max(tol.rel * total.abs());
        if err <= requested {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                intervals: heap.len(),
            });
        }
        let worst = match heap.peek() {
            Some(p) => p,
            None => {
                return Ok(QuadResult {
                    value: 0.0,
                    abs_error: 0.0,
                    intervals: 0,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if heap.len() >= tol.max_intervals || !(mid > worst.a && mid < worst.b) {
            return Err(SiltError::Quadrature {
                best: total,
                achieved: err,
                requested,
            });
        }
        let worst = heap.pop().expect("peeked");
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod21(&f, a, b);
            heap.push(Piece { a, b, value, error });
        }
    }
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    integrate_pieces(f, &[a, b], tol)
}

/// `[lo, lo*2, ..., hi/2, hi]`-style breakpoints, geometric toward `lo`.
pub(crate) fn geometric_breakpoints(lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![hi];
    let mut x = hi;
    while x * 0.5 > lo {
        x *= 0.5;
        pts.push(x);
    }
    pts.push(lo);
    pts.reverse();
    pts
}
