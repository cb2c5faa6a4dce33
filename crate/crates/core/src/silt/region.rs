use serde::{Deserialize, Serialize};

use crate::error::{Result, SiltError};

/// Axis-aligned rectangle `[r_lo, r_hi] x [s_lo, s_hi]` in the `(r, s)` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub r_lo: f64,
    pub r_hi: f64,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl Rect {
    pub fn new(r_lo: f64, r_hi: f64, s_lo: f64, s_hi: f64) -> Result<Rect> {
        let all = [r_lo, r_hi, s_lo, s_hi];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(SiltError::domain("region", "rectangle corners must be finite and >= 0"));
        }
        if !(r_hi > r_lo && s_hi > s_lo) {
            return Err(SiltError::domain("region", "rectangle has empty interior"));
        }
        if r_lo >= s_hi {
            return Err(SiltError::domain(
                "region",
                "rectangle lies entirely on or below the diagonal r = s",
            ));
        }
        Ok(Rect {
            r_lo,
            r_hi,
            s_lo,
            s_hi,
        })
    }

    fn overlaps(&self, o: &Rect) -> bool {
        self.r_lo < o.r_hi && o.r_lo < self.r_hi && self.s_lo < o.s_hi && o.s_lo < self.s_hi
    }
}

/// Area of `{(r, s) in [r0, r1] x [s0, s1] : s - r > kappa}`.
pub(crate) fn clipped_area(r0: f64, r1: f64, s0: f64, s1: f64, kappa: f64) -> f64 {
    if r1 <= r0 || s1 <= s0 {
        return 0.0;
    }
    // For fixed r the admissible s-length is clamp(c - r, 0, len).
    let c = s1 - kappa;
    let len = s1 - s0;
    let full_end = (c - len).min(r1);
    let mut area = 0.0;
    if full_end > r0 {
        area += (full_end - r0) * len;
    }
    let p = r0.max(c - len);
    let q = r1.min(c);
    if q > p {
        area += (q - p) * (2.0 * c - p - q) * 0.5;
    }
    area
}

/// A union of rectangles intersected with `{s - r > offset}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    label: String,
    pieces: Vec<Rect>,
    offset: f64,
}

impl Region {
    /// `D = {0 < r < s < t}`.
    pub fn full_triangle(t: f64) -> Result<Region> {
        Region::offset_triangle(t, 0.0).map(|mut r| {
            r.label = "D".into();
            r
        })
    }

    /// `D_kappa = {0 < r < s - kappa < t - kappa}`.
    pub fn offset_triangle(t: f64, kappa: f64) -> Result<Region> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(SiltError::domain("t", format!("{t} must be > 0")));
        }
        if !(kappa >= 0.0 && kappa < t) {
            return Err(SiltError::domain("kappa", format!("{kappa} not in [0, {t})")));
        }
        Ok(Region {
            label: format!("D_kappa={kappa}"),
            pieces: vec![Rect::new(0.0, t, 0.0, t)?],
            offset: kappa,
        })
    }

    /// `A_k^j = [(2k-2)2^-j, (2k-1)2^-j] x [(2k-1)2^-j, 2k 2^-j]`, scaled by `horizon`.
    pub fn dyadic_square(j: u32, k: u64, horizon: f64) -> Result<Region> {
        if !(1..=40).contains(&j) {
            return Err(SiltError::domain("j", format!("{j} not in 1..=40")));
        }
        if k < 1 || k > 1u64 << (j - 1) {
            return Err(SiltError::domain(
                "k",
                format!("{k} not in 1..={}", 1u64 << (j - 1)),
            ));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(SiltError::domain("horizon", format!("{horizon} must be > 0")));
        }
        let w = horizon / (1u64 << j) as f64;
        let k = k as f64;
        Ok(Region {
            label: format!("A_{k}^{j}"),
            pieces: vec![Rect::new(
                (2.0 * k - 2.0) * w,
                (2.0 * k - 1.0) * w,
                (2.0 * k - 1.0) * w,
                2.0 * k * w,
            )?],
            offset: 0.0,
        })
    }

    /// Arbitrary pairwise-disjoint rectangles, clipped to `{s > r}`.
    pub fn from_rects(label: impl Into<String>, pieces: Vec<Rect>) -> Result<Region> {
        if pieces.is_empty() {
            return Err(SiltError::domain("region", "no rectangles"));
        }
        for (i, a) in pieces.iter().enumerate() {
            for b in &pieces[i + 1..] {
                if a.overlaps(b) {
                    return Err(SiltError::domain("region", "rectangles overlap"));
                }
            }
        }
        Ok(Region {
            label: label.into(),
            pieces,
            offset: 0.0,
        })
    }

    /// Disjoint union; both parts must share the diagonal offset.
    pub fn union(&self, other: &Region) -> Result<Region> {
        if self.offset != other.offset {
            return Err(SiltError::domain("region", "union of regions with different offsets"));
        }
        let mut pieces = self.pieces.clone();
        pieces.extend_from_slice(&other.pieces);
        let mut u = Region::from_rects(format!("{}+{}", self.label, other.label), pieces)?;
        u.offset = self.offset;
        Ok(u)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn pieces(&self) -> &[Rect] {
        &self.pieces
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Lebesgue measure of the region.
    pub fn area(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| clipped_area(p.r_lo, p.r_hi, p.s_lo, p.s_hi, self.offset))
            .sum()
    }

    pub(crate) fn check_within(&self, horizon: f64) -> Result<()> {
        let slack = 1e-12 * horizon;
        for p in &self.pieces {
            if p.r_hi > horizon + slack || p.s_hi > horizon + slack {
                return Err(SiltError::domain(
                    "region",
                    format!(
                        "{} extends to {} beyond the path horizon {horizon}",
                        self.label,
                        p.r_hi.max(p.s_hi)
                    ),
                ));
            }
        }
        Ok(())
    }
}
