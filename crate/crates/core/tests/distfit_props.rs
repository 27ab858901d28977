mod common;

use dow_core::distfit::{
    default_shape_grid, exp_decay_fit_profile, tukey_pairwise, weibull_log_likelihood, weibull_mle,
    weibull_ppcc, weibull_ppcc_on_grid, weibull_profile_log_likelihood, weibull_profile_score,
};
use dow_core::synth::SplitMix64;

fn weibull_draws(rng: &mut SplitMix64, n: usize, shape: f64, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.exponential(1.0).powf(1.0 / shape)).collect()
}

#[test]
fn ppcc_identifies_exponential() {
    let mut rng = SplitMix64::new(1);
    let sample: Vec<f64> = (0..5000).map(|_| rng.exponential(1.0)).collect();
    let c = weibull_ppcc(&sample).unwrap();
    assert!((0.9..=1.1).contains(&c.best_shape), "{}", c.best_shape);
}

#[test]
fn ppcc_recovers_shape_two() {
    let mut rng = SplitMix64::new(2);
    let sample = weibull_draws(&mut rng, 5000, 2.0, 1.0);
    let c = weibull_ppcc(&sample).unwrap();
    assert!((1.8..=2.2).contains(&c.best_shape), "{}", c.best_shape);
}

#[test]
fn ppcc_scale_invariant() {
    let mut rng = SplitMix64::new(3);
    let sample = weibull_draws(&mut rng, 300, 1.5, 2.0);
    let base = weibull_ppcc(&sample).unwrap();
    for c in [0.001, 0.5, 3.0, 1e4] {
        let scaled: Vec<f64> = sample.iter().map(|x| x * c).collect();
        let other = weibull_ppcc_on_grid(&scaled, &default_shape_grid()).unwrap();
        for (a, b) in base.ppcc.iter().zip(&other.ppcc) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(base.best_shape, other.best_shape);
    }
}

#[test]
fn mle_exponential_rate_two() {
    let mut rng = SplitMix64::new(4);
    let sample: Vec<f64> = (0..10_000).map(|_| rng.exponential(2.0)).collect();
    let fit = weibull_mle(&sample).unwrap();
    let (shape, scale) = (fit.param("shape").unwrap(), fit.param("scale").unwrap());
    assert!((0.97..=1.03).contains(&shape), "{shape}");
    assert!((0.45..=0.55).contains(&scale), "{scale}");
    assert!(weibull_profile_score(&sample, shape).abs() < 1e-6 * sample.len() as f64);
}

#[test]
fn profile_score_matches_finite_difference() {
    let mut rng = SplitMix64::new(5);
    let sample = weibull_draws(&mut rng, 400, 1.3, 3.0);
    for _ in 0..20 {
        let c = 0.3 + 4.0 * rng.next_f64();
        let h = 1e-5 * c;
        let fd = (weibull_profile_log_likelihood(&sample, c + h)
            - weibull_profile_log_likelihood(&sample, c - h))
            / (2.0 * h);
        let an = weibull_profile_score(&sample, c);
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "c={c}: {fd} vs {an}");
    }
}

#[test]
fn mle_beats_perturbations() {
    let mut rng = SplitMix64::new(6);
    let sample = weibull_draws(&mut rng, 500, 0.8, 5.0);
    let fit = weibull_mle(&sample).unwrap();
    let (shape, scale) = (fit.param("shape").unwrap(), fit.param("scale").unwrap());
    let best = fit.log_likelihood.unwrap();
    assert!((best - weibull_log_likelihood(&sample, shape, scale)).abs() < 1e-9);
    for _ in 0..100 {
        let s = shape * (1.0 + 0.2 * (rng.next_f64() - 0.5));
        let l = scale * (1.0 + 0.2 * (rng.next_f64() - 0.5));
        assert!(weibull_log_likelihood(&sample, s, l) <= best + 1e-9);
    }
}

#[test]
fn decay_recovery_under_noise() {
    let mut rng = SplitMix64::new(8);
    for tau in [1.5, 2.545, 3.46, 6.0] {
        for _ in 0..20 {
            let profile: Vec<f64> = (0..7)
                .map(|k| {
                    let noise = 1.0 + 0.02 * (rng.next_f64() - 0.5);
                    100.0 * (-(k as f64) / tau).exp() * noise
                })
                .collect();
            let fit = exp_decay_fit_profile(&profile).unwrap();
            let got = fit.param("relaxation_time").unwrap();
            assert!((got - tau).abs() <= 0.02 * tau, "tau={tau}: {got}");
        }
    }
}

fn normal_groups(rng: &mut SplitMix64, sizes: &[usize], shifts: &[f64]) -> Vec<Vec<f64>> {
    sizes
        .iter()
        .zip(shifts)
        .map(|(&n, &m)| (0..n).map(|_| m + rng.normal()).collect())
        .collect()
}

#[test]
fn tukey_family_wise_error_rate() {
    let mut false_positive = 0;
    for seed in 0..100 {
        let mut rng = SplitMix64::new(1000 + seed);
        let groups = normal_groups(&mut rng, &[30; 7], &[0.0; 7]);
        let r = tukey_pairwise(&groups).unwrap();
        if r.pairs.iter().any(|p| p.p_value < 0.05) {
            false_positive += 1;
        }
    }
    // 0.05 ± 0.03 over 100 replications, as counts to keep the interval closed.
    assert!((2..=8).contains(&false_positive), "{false_positive}/100");
}

#[test]
fn tukey_planted_effect() {
    let mut rng = SplitMix64::new(77);
    let mut shifts = [0.0; 7];
    shifts[3] = 5.0;
    let groups = normal_groups(&mut rng, &[104, 104, 105, 105, 104, 104, 104], &shifts);
    let r = tukey_pairwise(&groups).unwrap();
    for p in &r.pairs {
        if p.first == 3 || p.second == 3 {
            assert!(p.p_value < 0.001, "{}: {}", p.label, p.p_value);
        }
    }
}

#[test]
fn tukey_permutation_equivariant() {
    let mut rng = SplitMix64::new(31);
    let groups = normal_groups(&mut rng, &[20, 22, 25, 20, 21, 23, 24], &[0.0, 0.3, 0.1, 0.8, 0.0, -0.2, 0.4]);
    let base = tukey_pairwise(&groups).unwrap();
    let perm = [4, 2, 6, 0, 1, 5, 3];
    // relabelled[i] = groups[perm[i]]
    let relabelled: Vec<Vec<f64>> = perm.iter().map(|&i| groups[i].clone()).collect();
    let other = tukey_pairwise(&relabelled).unwrap();
    for i in 0..7 {
        for j in i + 1..7 {
            let a = other.pair(i, j).unwrap().p_value;
            let b = base.pair(perm[i], perm[j]).unwrap().p_value;
            assert!((a - b).abs() < 1e-12);
        }
    }
}
