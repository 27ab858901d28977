use dow_core::granger::granger_test;
use dow_core::special::f_upper_tail;
use dow_core::synth::SplitMix64;
use dow_core::Error;
use proptest::prelude::*;

fn noise(rng: &mut SplitMix64, n: usize, sd: f64) -> Vec<f64> {
    (0..n).map(|_| sd * rng.normal()).collect()
}

/// Lanczos (g = 7, n = 9) log-gamma.
fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn f_density(x: f64, d1: f64, d2: f64) -> f64 {
    let ln_b = ln_gamma(d1 / 2.0) + ln_gamma(d2 / 2.0) - ln_gamma((d1 + d2) / 2.0);
    (0.5 * d1 * (d1 / d2).ln() + (0.5 * d1 - 1.0) * x.ln() - 0.5 * (d1 + d2) * (1.0 + d1 * x / d2).ln() - ln_b).exp()
}

/// ∫_f^∞ density, mapped onto s ∈ (0, 1] by x = f / s and integrated by Simpson's rule.
fn f_tail_by_quadrature(f: f64, d1: f64, d2: f64) -> f64 {
    let m = 20_000;
    let h = 1.0 / m as f64;
    let g = |s: f64| if s <= 0.0 { 0.0 } else { f_density(f / s, d1, d2) * f / (s * s) };
    let mut acc = g(0.0) + g(1.0);
    for i in 1..m {
        acc += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn f_tail_matches_density_integration() {
    let mut rng = SplitMix64::new(5);
    for _ in 0..50 {
        let f = 0.05 + 6.0 * rng.next_f64();
        let d1 = (1 + rng.next_u64() % 10) as f64;
        let d2 = (6 + rng.next_u64() % 800) as f64;
        let got = f_upper_tail(f, d1, d2);
        let want = f_tail_by_quadrature(f, d1, d2);
        assert!((got - want).abs() < 1e-6, "F={f} d1={d1} d2={d2}: {got} vs {want}");
    }
}

#[test]
fn zero_lags_is_a_contract_error() {
    let v = vec![1.0; 50];
    assert!(matches!(granger_test(&v, &v, 0), Err(Error::Contract(_))));
}

#[test]
fn restricted_fit_never_beats_unrestricted() {
    let mut rng = SplitMix64::new(77);
    for _ in 0..1000 {
        let lags = 1 + (rng.next_u64() % 8) as usize;
        let n = 3 * lags + 6 + (rng.next_u64() % 300) as usize;
        let x = noise(&mut rng, n, 1.0);
        let y = noise(&mut rng, n, 1.0);
        let r = granger_test(&y, &x, lags).unwrap();
        assert!(r.rss_restricted >= r.rss_unrestricted - 1e-9);
        assert!(r.f_stat >= 0.0);
        assert!((0.0..=1.0).contains(&r.p_value));
        assert_eq!(r.df_den, n - lags - 2 * lags - 1);
    }
}

#[test]
fn planted_lag_detected_in_one_direction() {
    let mut rng = SplitMix64::new(8);
    let x = noise(&mut rng, 730, 1.0);
    let mut y = noise(&mut rng, 730, 0.1);
    for t in 1..730 {
        y[t] += 0.5 * x[t - 1];
    }
    let fwd = granger_test(&y, &x, 7).unwrap();
    assert!(fwd.p_value < 1e-6);
    let w = fwd.robust_wald.unwrap();
    assert!(w.p < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn f_unchanged_by_constant_shifts(seed in any::<u64>(), a in -50.0..50.0f64, b in -50.0..50.0f64, lags in 1usize..8) {
        let mut rng = SplitMix64::new(seed);
        let x = noise(&mut rng, 200, 1.0);
        let y = noise(&mut rng, 200, 1.0);
        let base = granger_test(&y, &x, lags).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| v + a).collect();
        let ys: Vec<f64> = y.iter().map(|v| v + b).collect();
        let moved = granger_test(&ys, &xs, lags).unwrap();
        prop_assert!((base.f_stat - moved.f_stat).abs() < 1e-9 * base.f_stat.max(1.0));
    }
}
