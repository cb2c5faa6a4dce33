use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use silt_core::fbm::{
    characteristic_functional, covariance, generate_path, lnd_ratio, ConfigurationTimes,
    FbmGenerator, Synthesis,
};
use silt_core::stats::Summary;
use silt_core::HurstParameter;

fn hp(h: f64) -> HurstParameter {
    HurstParameter::new(h).unwrap()
}

#[test]
fn terminal_variance_matches_covariance() {
    for (h, horizon) in [(0.3, 1.0), (0.7, 2.0)] {
        let gen = FbmGenerator::new(hp(h), horizon, 16, Synthesis::Auto).unwrap();
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|s| gen.sample(s).values()[16]).collect();
        let s = Summary::of(&xs);
        let target = covariance(horizon, horizon, hp(h)).unwrap();
        // Var of the sample variance of Gaussians: 2 sigma^4 / (n - 1).
        let se = target * (2.0 / (n as f64 - 1.0)).sqrt();
        assert!((s.variance - target).abs() < 3.0 * se, "H={h}: {} vs {target}", s.variance);
        assert!(s.mean.abs() < 4.0 * (target / n as f64).sqrt());
    }
}

#[test]
fn brownian_increments_are_white() {
    let n_steps = 256;
    let dt = 2.0 / n_steps as f64;
    let mut incs = Vec::new();
    for seed in 0..200 {
        let p = generate_path(hp(0.5), 2.0, n_steps, seed).unwrap();
        incs.extend(p.values().windows(2).map(|w| w[1] - w[0]));
    }
    let s = Summary::of(&incs);
    let se = dt * (2.0 / (incs.len() as f64 - 1.0)).sqrt();
    assert!((s.variance - dt).abs() < 4.0 * se, "{} vs {dt}", s.variance);
    let lag1: Vec<f64> = incs.windows(2).map(|w| w[0] * w[1]).collect();
    let l = Summary::of(&lag1);
    assert!(l.mean.abs() < 4.0 * l.std_error());
}

#[test]
fn fractional_noise_lag_covariance() {
    // Lag-1 covariance of unit-spaced increments is (2^{2H} - 2) / 2.
    let h = 0.3;
    let gen = FbmGenerator::new(hp(h), 64.0, 64, Synthesis::CirculantEmbedding).unwrap();
    let mut prods = Vec::new();
    for seed in 0..2000 {
        let v = gen.sample(seed).values().to_vec();
        for k in 0..63 {
            prods.push((v[k + 1] - v[k]) * (v[k + 2] - v[k + 1]));
        }
    }
    let s = Summary::of(&prods);
    let target = 0.5 * (2f64.powf(2.0 * h) - 2.0);
    // Products within a path are correlated; allow a generous band.
    assert!((s.mean - target).abs() < 0.02, "{} vs {target}", s.mean);
}

#[test]
fn covariance_is_positive_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &h in &[0.05, 0.3, 0.5, 0.8, 0.97] {
        for size in [2usize, 8, 32, 64] {
            let times: Vec<f64> = (0..size).map(|_| rng.random_range(0.0..5.0)).collect();
            let m = DMatrix::from_fn(size, size, |i, j| covariance(times[i], times[j], hp(h)).unwrap());
            assert_eq!(m, m.transpose());
            let eig = SymmetricEigen::new(m).eigenvalues;
            let max = eig.max();
            assert!(eig.min() >= -1e-10 * max, "H={h} size={size}: {}", eig.min());
        }
    }
}

#[test]
fn nested_pair_functional_against_monte_carlo() {
    // r1 r2 s2 s1: u = (p1, p1 + p2, p1) over the three gaps.
    let h = hp(0.35);
    let times = [0.1, 0.35, 0.6, 0.9];
    let (p1, p2) = (1.3, -0.8);
    let weights = [p1, p1 + p2, p1];
    let ct = ConfigurationTimes::new(times.to_vec()).unwrap();
    let exact = characteristic_functional(&ct, &weights, h).unwrap();

    let cov = DMatrix::from_fn(4, 4, |i, j| covariance(times[i], times[j], h).unwrap());
    let chol = cov.cholesky().unwrap().l();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 1_000_000;
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for _ in 0..n {
        let z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let b: Vec<f64> = (0..4).map(|i| (0..=i).map(|k| chol[(i, k)] * z[k]).sum()).collect();
        let phase = p1 * (b[3] - b[0]) + p2 * (b[2] - b[1]);
        re.push(phase.cos());
        im.push(phase.sin());
    }
    let (re, im) = (Summary::of(&re), Summary::of(&im));
    assert!((re.mean - exact).abs() < 3.0 * re.std_error(), "{} vs {exact}", re.mean);
    assert!(im.mean.abs() < 3.0 * im.std_error());
}

/// Random nondecreasing times with strictly positive gaps, and weights.
fn random_configuration(rng: &mut ChaCha8Rng, arcs: usize) -> (ConfigurationTimes, Vec<f64>) {
    let mut t: Vec<f64> = (0..2 * arcs).map(|_| rng.random_range(0.0..1.0)).collect();
    t.sort_by(f64::total_cmp);
    let w = (0..2 * arcs - 1).map(|_| rng.random_range(-3.0..3.0)).collect();
    (ConfigurationTimes::new(t).unwrap(), w)
}

#[test]
fn lnd_ratio_is_bounded_below() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &h in &[0.3, 0.5, 0.7] {
        let mut worst = f64::INFINITY;
        for i in 0..10_000 {
            let (ct, w) = random_configuration(&mut rng, 1 + i % 4);
            if ct.gaps().iter().any(|&a| a <= 0.0) {
                continue;
            }
            let r = lnd_ratio(&ct, &w, hp(h)).unwrap();
            if h == 0.5 {
                assert!((r - 1.0).abs() < 1e-12);
            }
            worst = worst.min(r);
        }
        println!("H={h}: empirical infimum of the variance ratio {worst:.6}");
        assert!(worst > 0.0);
    }
}

proptest! {
    #[test]
    fn covariance_symmetry_and_scaling(
        s in 0.0f64..10.0,
        t in 0.0f64..10.0,
        c in 0.1f64..10.0,
        h in 0.01f64..0.99,
    ) {
        let h = hp(h);
        let a = covariance(s, t, h).unwrap();
        prop_assert_eq!(a, covariance(t, s, h).unwrap());
        let scaled = covariance(c * s, c * t, h).unwrap();
        let expected = c.powf(2.0 * h.value()) * a;
        prop_assert!((scaled - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn functional_never_exceeds_one(seed in any::<u64>(), arcs in 1usize..5, h in 0.05f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ct, w) = random_configuration(&mut rng, arcs);
        let v = characteristic_functional(&ct, &w, hp(h)).unwrap();
        prop_assert!(v <= 1.0 && v >= 0.0);
        let zero = characteristic_functional(&ct, &vec![0.0; w.len()], hp(h)).unwrap();
        prop_assert_eq!(zero, 1.0);
    }

    #[test]
    fn regeneration_is_bitwise(seed in any::<u64>(), h in 0.05f64..0.95) {
        let a = generate_path(hp(h), 1.5, 50, seed).unwrap();
        let b = generate_path(hp(h), 1.5, 50, seed).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert_eq!(a.values()[0], 0.0);
        prop_assert_eq!(a.values().len(), 51);
    }
}
