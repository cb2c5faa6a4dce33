use serde::{Deserialize, Serialize};

use crate::error::{Result, SiltError};
use crate::fbm::FbmPath;

/// Occupation density of a path on bins centred at `k * bin_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeProfile {
    pub bin_width: f64,
    pub bin_centers: Vec<f64>,
    pub values: Vec<f64>,
    first_index: i64,
}

/// `(max - min) / 256`, or 1 for a constant path.
pub fn default_bin_width(path: &FbmPath) -> f64 {
    let (lo, hi) = path.range();
    if hi > lo {
        (hi - lo) / 256.0
    } else {
        1.0
    }
}

/// Each sample `B_{t_k}` deposits its trapezoid time weight (`dt/2` at the two
/// ends, `dt` inside) into the bin containing it, divided by the bin width.
pub fn local_time(path: &FbmPath, bin_width: f64) -> Result<LocalTimeProfile> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(SiltError::domain("bin_width", format!("{bin_width} must be > 0")));
    }
    let idx = |x: f64| (x / bin_width).round() as i64;
    let v = path.values();
    let first = v.iter().map(|&x| idx(x)).min().expect("nonempty path");
    let last = v.iter().map(|&x| idx(x)).max().expect("nonempty path");
    let len = (last - first + 1) as usize;
    let mut values = vec![0.0; len];
    let dt = path.step();
    let n = path.n_steps();
    for (k, &x) in v.iter().enumerate() {
        let w = if k == 0 || k == n { 0.5 * dt } else { dt };
        values[(idx(x) - first) as usize] += w / bin_width;
    }
    Ok(LocalTimeProfile {
        bin_width,
        bin_centers: (first..=last).map(|k| k as f64 * bin_width).collect(),
        values,
        first_index: first,
    })
}

impl LocalTimeProfile {
    /// Piecewise-linear interpolation between bin centres, 0 outside.
    pub fn at(&self, x: f64) -> f64 {
        let p = x / self.bin_width - self.first_index as f64;
        let i = p.floor();
        let frac = p - i;
        let get = |k: f64| {
            if k < 0.0 || k >= self.values.len() as f64 {
                0.0
            } else {
                self.values[k as usize]
            }
        };
        (1.0 - frac) * get(i) + frac * get(i + 1.0)
    }

    /// Nearest multiple of the bin width and the distance to it.
    pub fn snap(&self, y: f64) -> (f64, f64) {
        let s = (y / self.bin_width).round() * self.bin_width;
        (s, (y - s).abs())
    }

    /// `bin_width * sum values`.
    pub fn total_time(&self) -> f64 {
        self.bin_width * self.values.iter().sum::<f64>()
    }
}

/// `1/2 * bin_width * sum_i L(x_i + y) L(x_i)`.
pub fn alpha_via_local_time(profile: &LocalTimeProfile, y: f64) -> f64 {
    let s: f64 = profile
        .bin_centers
        .iter()
        .zip(&profile.values)
        .map(|(&x, &l)| if l == 0.0 { 0.0 } else { profile.at(x + y) * l })
        .sum();
    0.5 * profile.bin_width * s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnappedAlpha {
    pub y_requested: f64,
    pub y_used: f64,
    pub snap_distance: f64,
    pub value: f64,
}

/// [`alpha_via_local_time`] at `y` snapped to the bin lattice.
pub fn alpha_via_local_time_snapped(profile: &LocalTimeProfile, y: f64) -> SnappedAlpha {
    let (y_used, snap_distance) = profile.snap(y);
    SnappedAlpha {
        y_requested: y,
        y_used,
        snap_distance,
        value: alpha_via_local_time(profile, y_used),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{generate_path, HurstParameter};

    fn hp(v: f64) -> HurstParameter {
        HurstParameter::new(v).unwrap()
    }

    #[test]
    fn mass_is_horizon() {
        let p = generate_path(hp(0.3), 1.7, 999, 2).unwrap();
        let lt = local_time(&p, default_bin_width(&p)).unwrap();
        assert!((lt.total_time() - 1.7).abs() < 1e-12);
        assert!(lt.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn constant_path_single_bin() {
        let p = FbmPath::from_samples(hp(0.5), 2.0, 0, vec![0.0; 11]).unwrap();
        let lt = local_time(&p, 0.1).unwrap();
        assert_eq!(lt.values.len(), 1);
        assert!((lt.values[0] * 0.1 - 2.0).abs() < 1e-12);
        // alpha(0) = 1/2 * bw * L^2 = t^2 / (2 bw).
        assert!((alpha_via_local_time(&lt, 0.0) - 4.0 / 0.2).abs() < 1e-9);
        assert_eq!(alpha_via_local_time(&lt, 5.0), 0.0);
    }

    #[test]
    fn y_zero_is_sum_of_squares() {
        let p = generate_path(hp(0.5), 1.0, 500, 6).unwrap();
        let lt = local_time(&p, 0.05).unwrap();
        let want = 0.5 * 0.05 * lt.values.iter().map(|l| l * l).sum::<f64>();
        assert!((alpha_via_local_time(&lt, 0.0) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn snapping_records_distance() {
        let p = generate_path(hp(0.5), 1.0, 100, 6).unwrap();
        let lt = local_time(&p, 0.1).unwrap();
        let s = alpha_via_local_time_snapped(&lt, 0.23);
        assert!((s.y_used - 0.2).abs() < 1e-12);
        assert!((s.snap_distance - 0.03).abs() < 1e-12);
    }

    #[test]
    fn interpolation_at_centres() {
        let p = generate_path(hp(0.5), 1.0, 300, 1).unwrap();
        let lt = local_time(&p, 0.07).unwrap();
        for (c, v) in lt.bin_centers.iter().zip(&lt.values) {
            assert!((lt.at(*c) - v).abs() < 1e-9 * v.max(1.0));
        }
        assert!(local_time(&p, 0.0).is_err());
    }
}
