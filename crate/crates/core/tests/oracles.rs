//! Estimator and simulator checks against independent oracles: known
//! distributions, analytic moments and directly simulated surrogates.

use rand::Rng;
use rand_distr::{StandardNormal, StudentT};
use tickdiff::arch::{coarse_grain_experiment, simulate_arch, ArchParams, CoarseGrainSweep};
use tickdiff::estimators::{ccdf, dfa_hurst, fit_line, zero_frequency, DfaSettings};
use tickdiff::rng::{replicate_seed, stream};

#[test]
fn student_t3_tail_slope() {
    let mut rng = stream(2024);
    let dist = StudentT::new(3.0).unwrap();
    let x: Vec<f64> = (0..100_000).map(|_| rng.sample(dist)).collect();
    let mut mags: Vec<f64> = x.iter().map(|v| f64::abs(*v)).collect();
    mags.sort_by(f64::total_cmp);
    // top decile: from the 90th percentile up to the 10th-largest value
    let lo = mags[mags.len() * 9 / 10];
    let hi = mags[mags.len() - 10];
    let thresholds: Vec<f64> = (0..20)
        .map(|i| lo * ((hi / lo).ln() * f64::from(i) / 19.0).exp())
        .collect();
    let est = ccdf(&x, &thresholds).unwrap();
    let lx: Vec<f64> = thresholds.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = est.probabilities.iter().map(|p| p.ln()).collect();
    let slope = fit_line(&lx, &ly).unwrap().slope;
    assert!((slope + 3.0).abs() <= 0.3, "log-log ccdf slope {slope}");
}

#[test]
fn arch_stationary_variance() {
    // pooled over 20 seeds x 2^16, compared with alpha0 / (1 - alpha1)
    let params = ArchParams::default();
    let (mut sum, mut sum_sq, mut n) = (0.0, 0.0, 0usize);
    for i in 0..20 {
        let r = simulate_arch(&params.with_seed(replicate_seed(params.seed, i))).unwrap();
        for v in r.values() {
            sum += v;
            sum_sq += v * v;
        }
        n += r.len();
    }
    let mean = sum / n as f64;
    let var = sum_sq / n as f64 - mean * mean;
    let target = params.stationary_variance();
    println!("pooled variance {var:.4} vs {target}");
    assert!((var - target).abs() <= 0.1 * target, "pooled variance {var}");
}

#[test]
fn coarser_ticks_are_stickier() {
    let params = ArchParams { seed: 77, ..ArchParams::default() };
    let sweep = CoarseGrainSweep::from_multiples(&params, &[0.5, 2.0], 10, 20);
    let table = coarse_grain_experiment(&params, &sweep).unwrap();
    let fine = table.zero_row(sweep.deltas[0]).unwrap();
    let coarse = table.zero_row(sweep.deltas[1]).unwrap();
    assert!(coarse.mean_p0 > fine.mean_p0);
    // per replicate as well, not only on average
    for &seed in &table.seeds {
        let latent = simulate_arch(&params.with_seed(seed)).unwrap();
        let p = |d: f64| {
            let obs = tickdiff::arch::observed_returns(&latent, 0.0, d).unwrap();
            zero_frequency(obs.values()).unwrap().p0
        };
        assert!(p(sweep.deltas[1]) > p(sweep.deltas[0]));
    }
}

#[test]
fn vanishing_tick_matches_baseline() {
    let params = ArchParams { seed: 5, ..ArchParams::default() };
    let tiny = 1e-9 * params.stationary_std();
    let sweep = CoarseGrainSweep { deltas: vec![0.0, tiny], max_lag: 10, n_seeds: 4 };
    let table = coarse_grain_experiment(&params, &sweep).unwrap();
    for lag in 1..=10 {
        let a = table.row(0.0, lag).unwrap().mean_acf.unwrap();
        let b = table.row(tiny, lag).unwrap().mean_acf.unwrap();
        assert!((a - b).abs() < 1e-6, "lag {lag}: {a} vs {b}");
    }
}

#[test]
fn sweep_is_deterministic() {
    let params = ArchParams { n: 4096, seed: 9, ..ArchParams::default() };
    let sweep = CoarseGrainSweep::default_for(&params);
    let a = coarse_grain_experiment(&params, &sweep).unwrap();
    let b = coarse_grain_experiment(&params, &sweep).unwrap();
    assert_eq!(a, b);
}

/// Gaussian superposition of AR(1) components with log-spaced time scales
/// `tau_j` and variances proportional to `tau_j^-gamma`; its ACF follows
/// `k^-gamma` between the smallest and largest time scale.
fn long_memory_surrogate(n: usize, gamma: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed);
    let taus: Vec<f64> = (0..18).map(|j| 2f64.powi(j)).collect();
    let weights: Vec<f64> = taus.iter().map(|t| t.powf(-gamma)).collect();
    let phis: Vec<f64> = taus.iter().map(|t| (-1.0 / t).exp()).collect();
    let mut state: Vec<f64> = weights
        .iter()
        .map(|w| w.sqrt() * rng.sample::<f64, _>(StandardNormal))
        .collect();
    (0..n)
        .map(|_| {
            let mut x = 0.0;
            for j in 0..taus.len() {
                let z: f64 = rng.sample(StandardNormal);
                state[j] = phis[j] * state[j] + (weights[j] * (1.0 - phis[j] * phis[j])).sqrt() * z;
                x += state[j];
            }
            x
        })
        .collect()
}

#[test]
fn long_memory_raises_hurst() {
    let n = 1 << 16;
    let settings = DfaSettings::default();
    let arch = simulate_arch(&ArchParams { seed: 31, ..ArchParams::default() }).unwrap();
    let h_arch = settings.estimate(&arch.abs()).unwrap().hurst;
    let surrogate = long_memory_surrogate(n, 0.4, 32);
    let est = settings.estimate(&surrogate).unwrap();
    println!("H(|ARCH|) = {h_arch:.3}, H(surrogate) = {:.3}, gamma = {:.3}", est.hurst, est.gamma());
    assert!(est.hurst - h_arch >= 0.1);
}

#[test]
fn dfa_on_white_noise_band() {
    let n = 1 << 16;
    let inside = (0..50u64)
        .filter(|&s| {
            let mut rng = stream(replicate_seed(1000, s));
            let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let h = dfa_hurst(&x, 16, n / 8, 10).unwrap().hurst;
            (0.45..=0.55).contains(&h)
        })
        .count();
    assert!(inside >= 45, "{inside}/50 seeds in [0.45, 0.55]");
}
