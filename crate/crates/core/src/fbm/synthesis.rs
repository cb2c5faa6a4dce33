use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::HurstParameter;
use crate::error::{Result, SiltError};

/// Eigenvalues above `-PSD_TOLERANCE * max` are clamped to zero.
const PSD_TOLERANCE: f64 = 1e-10;

/// A sampled trajectory of fBm on the closed uniform grid `k * horizon / n_steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FbmPath {
    hurst: HurstParameter,
    horizon: f64,
    seed: u64,
    values: Vec<f64>,
}

impl FbmPath {
    /// Wraps externally produced samples (synthetic paths in tests, CSV input).
    /// Generated paths always start at 0; this constructor does not insist on it.
    pub fn from_samples(
        hurst: HurstParameter,
        horizon: f64,
        seed: u64,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(SiltError::domain("horizon", format!("{horizon} must be > 0")));
        }
        if values.len() < 2 {
            return Err(SiltError::domain("values", "need at least one step"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SiltError::domain("values", "non-finite sample"));
        }
        Ok(FbmPath {
            hurst,
            horizon,
            seed,
            values,
        })
    }

    pub fn hurst(&self) -> HurstParameter {
        self.hurst
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid spacing.
    pub fn step(&self) -> f64 {
        self.horizon / self.n_steps() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.horizon * k as f64 / self.n_steps() as f64
    }

    /// (min, max) of the sampled values.
    pub fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// The path restricted to its first `k` steps (horizon shrinks accordingly).
    pub fn truncated(&self, k: usize) -> Result<FbmPath> {
        if k == 0 || k > self.n_steps() {
            return Err(SiltError::domain(
                "k",
                format!("truncation {k} outside 1..={}", self.n_steps()),
            ));
        }
        FbmPath::from_samples(
            self.hurst,
            self.time(k),
            self.seed,
            self.values[..=k].to_vec(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Synthesis {
    /// Circulant embedding, falling back to Cholesky when the embedding is not PSD.
    Auto,
    CirculantEmbedding,
    Cholesky,
}

enum Route {
    Circulant {
        sqrt_eigen: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Cholesky {
        lower: DMatrix<f64>,
    },
}

/// Precomputed synthesis state for one `(H, horizon, n_steps)`; draws paths by seed.
pub struct FbmGenerator {
    hurst: HurstParameter,
    horizon: f64,
    n_steps: usize,
    route: Route,
}

impl std::fmt::Debug for FbmGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FbmGenerator")
            .field("hurst", &self.hurst)
            .field("horizon", &self.horizon)
            .field("n_steps", &self.n_steps)
            .field("method", &self.method())
            .finish()
    }
}

/// Autocovariance of unit-spacing fractional Gaussian noise at lag `k`.
fn fgn_autocovariance(k: usize, two_h: f64) -> f64 {
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

impl FbmGenerator {
    pub fn new(
        hurst: HurstParameter,
        horizon: f64,
        n_steps: usize,
        method: Synthesis,
    ) -> Result<Self> {
        if n_steps < 1 {
            return Err(SiltError::domain("n_steps", "must be >= 1"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(SiltError::domain("horizon", format!("{horizon} must be > 0")));
        }
        let route = match method {
            Synthesis::Cholesky => Self::cholesky_route(hurst, n_steps).map_err(|reason| {
                SiltError::Synthesis {
                    embedding: "not attempted".into(),
                    fallback: "cholesky",
                    reason,
                }
            })?,
            Synthesis::CirculantEmbedding => {
                Self::circulant_route(hurst, n_steps).map_err(|embedding| {
                    SiltError::Synthesis {
                        embedding,
                        fallback: "disabled",
                        reason: "circulant embedding requested explicitly".into(),
                    }
                })?
            }
            Synthesis::Auto => match Self::circulant_route(hurst, n_steps) {
                Ok(route) => route,
                Err(embedding) => Self::cholesky_route(hurst, n_steps).map_err(|reason| {
                    SiltError::Synthesis {
                        embedding,
                        fallback: "cholesky",
                        reason,
                    }
                })?,
            },
        };
        Ok(FbmGenerator {
            hurst,
            horizon,
            n_steps,
            route,
        })
    }

    fn circulant_route(
        hurst: HurstParameter,
        n_steps: usize,
    ) -> std::result::Result<Route, String> {
        let two_h = hurst.twice();
        let half = n_steps.next_power_of_two();
        let m = 2 * half;
        let mut row: Vec<Complex<f64>> = Vec::with_capacity(m);
        for k in 0..=half {
            row.push(Complex::new(fgn_autocovariance(k, two_h), 0.0));
        }
        for k in (1..half).rev() {
            row.push(Complex::new(fgn_autocovariance(k, two_h), 0.0));
        }
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);
        let max = row.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let min = row.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if min < -PSD_TOLERANCE * max {
            return Err(format!(
                "embedding of size {m} has eigenvalue {min:e} below -{PSD_TOLERANCE:e}*{max:e}"
            ));
        }
        let sqrt_eigen = row
            .iter()
            .map(|z| (z.re.max(0.0) / m as f64).sqrt())
            .collect();
        Ok(Route::Circulant { sqrt_eigen, fft })
    }

    fn cholesky_route(hurst: HurstParameter, n_steps: usize) -> std::result::Result<Route, String> {
        let two_h = hurst.twice();
        let cov = DMatrix::from_fn(n_steps, n_steps, |i, j| {
            fgn_autocovariance(i.abs_diff(j), two_h)
        });
        match cov.cholesky() {
            Some(ch) => Ok(Route::Cholesky { lower: ch.l() }),
            None => Err(format!(
                "increment covariance of size {n_steps} is numerically not positive definite"
            )),
        }
    }

    pub fn method(&self) -> Synthesis {
        match self.route {
            Route::Circulant { .. } => Synthesis::CirculantEmbedding,
            Route::Cholesky { .. } => Synthesis::Cholesky,
        }
    }

    pub fn sample(&self, seed: u64) -> FbmPath {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.n_steps;
        let noise: Vec<f64> = match &self.route {
            Route::Circulant { sqrt_eigen, fft } => {
                let mut buf: Vec<Complex<f64>> = sqrt_eigen
                    .iter()
                    .map(|&s| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                buf[..n].iter().map(|z| z.re).collect()
            }
            Route::Cholesky { lower } => {
                let z = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
                (lower * z).iter().copied().collect()
            }
        };
        let scale = (self.horizon / n as f64).powf(self.hurst.value());
        let mut values = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for x in noise {
            acc += scale * x;
            values.push(acc);
        }
        FbmPath {
            hurst: self.hurst,
            horizon: self.horizon,
            seed,
            values,
        }
    }
}

/// One exact-in-distribution fBm path; identical arguments give identical samples.
pub fn generate_path(
    hurst: HurstParameter,
    horizon: f64,
    n_steps: usize,
    seed: u64,
) -> Result<FbmPath> {
    Ok(FbmGenerator::new(hurst, horizon, n_steps, Synthesis::Auto)?.sample(seed))
}
