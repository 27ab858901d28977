//! Distribution tails used by the hypothesis tests.
//!
//! Incomplete gamma/beta functions come from `statrs`; the studentized
//! range distribution is computed here by Gauss-Legendre quadrature.

use statrs::function::{beta::beta_reg, erf::erfc, gamma::gamma_ur, gamma::ln_gamma};

use crate::error::{Error, Result};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// P(X > x) for X ~ χ²(df).
pub fn chi2_upper_tail(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    gamma_ur(df / 2.0, x / 2.0).clamp(0.0, 1.0)
}

/// Critical value c with P(χ²(df) > c) = `upper_tail`.
pub fn chi2_critical(df: f64, upper_tail: f64) -> Result<f64> {
    if !(upper_tail > 0.0 && upper_tail < 1.0) || df <= 0.0 {
        return Err(Error::Domain(format!(
            "chi2 quantile needs 0 < tail < 1 and df > 0, got tail={upper_tail}, df={df}"
        )));
    }
    let mut hi = df.max(1.0);
    while chi2_upper_tail(hi, df) > upper_tail {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numeric("chi2 quantile failed to bracket".into()));
        }
    }
    // Upper tail is decreasing in x.
    find_root(|x| upper_tail - chi2_upper_tail(x, df), 0.0, hi, 1e-12)
}

/// P(F > f) for F ~ F(d1, d2).
pub fn f_upper_tail(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f)).clamp(0.0, 1.0)
}

/// Two-sided p-value of a Student-t statistic.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Bisection on a sign-changing bracket `[lo, hi]` until the bracket is
/// narrower than `tol`.
pub(crate) fn find_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Numeric(format!(
            "root not bracketed: f({lo})={flo}, f({hi})={fhi}"
        )));
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

const LEG12_X: [f64; 6] = [
    0.981_560_634_246_719_3,
    0.904_117_256_370_474_9,
    0.769_902_674_194_304_7,
    0.587_317_954_286_617_4,
    0.367_831_498_998_180_2,
    0.125_233_408_511_468_9,
];
const LEG12_W: [f64; 6] = [
    0.047_175_336_386_511_83,
    0.106_939_325_995_318_4,
    0.160_078_328_543_346_2,
    0.203_167_426_723_065_9,
    0.233_492_536_538_354_8,
    0.249_147_045_813_402_8,
];
const LEG16_X: [f64; 8] = [
    0.989_400_934_991_649_9,
    0.944_575_023_073_232_6,
    0.865_631_202_387_831_7,
    0.755_404_408_355_003,
    0.617_876_244_402_643_7,
    0.458_016_777_657_227_4,
    0.281_603_550_779_258_9,
    0.095_012_509_837_637_44,
];
const LEG16_W: [f64; 8] = [
    0.027_152_459_411_754_09,
    0.062_253_523_938_647_89,
    0.095_158_511_682_492_78,
    0.124_628_971_255_533_9,
    0.149_595_988_816_576_7,
    0.169_156_519_395_002_5,
    0.182_603_415_044_923_6,
    0.189_450_610_455_068_5,
];

/// CDF of the range of `groups` independent standard normals.
fn range_cdf(w: f64, groups: f64) -> f64 {
    const UPPER: f64 = 8.0;
    let half = 0.5 * w;
    if half >= UPPER {
        return 1.0;
    }
    // First term of Hartley's form: (2Φ(w/2) − 1)^k.
    let mut pr = 2.0 * normal_cdf(half) - 1.0;
    pr = if pr >= (-50.0 / groups).exp() {
        pr.powf(groups)
    } else {
        0.0
    };

    let intervals = if w > 3.0 { 2 } else { 3 };
    let width = (UPPER - half) / intervals as f64;
    let km1 = groups - 1.0;
    let cutoff = (-30.0 / km1).exp();
    let mut lo = half;
    let mut integral = 0.0;
    for _ in 0..intervals {
        let hi = lo + width;
        let centre = 0.5 * (lo + hi);
        let radius = 0.5 * (hi - lo);
        let mut sum = 0.0;
        for (&node, &wt) in LEG12_X.iter().zip(&LEG12_W) {
            for x in [-node, node] {
                let z = centre + radius * x;
                let zz = z * z;
                if zz > 60.0 {
                    continue;
                }
                let inner = normal_cdf(z) - normal_cdf(z - w);
                if inner >= cutoff {
                    sum += wt * (-0.5 * zz).exp() * inner.powf(km1);
                }
            }
        }
        integral += sum * 2.0 * radius * groups / (2.0 * std::f64::consts::PI).sqrt();
        lo = hi;
    }
    pr += integral;
    if pr <= (-30.0f64).exp() {
        return 0.0;
    }
    pr.min(1.0)
}

/// CDF of the studentized range distribution with `groups` means and `df`
/// error degrees of freedom.
pub fn studentized_range_cdf(q: f64, groups: usize, df: f64) -> Result<f64> {
    if groups < 2 || df < 2.0 {
        return Err(Error::Domain(format!(
            "studentized range needs k >= 2 and df >= 2, got k={groups}, df={df}"
        )));
    }
    if q <= 0.0 {
        return Ok(0.0);
    }
    if q.is_infinite() {
        return Ok(1.0);
    }
    let k = groups as f64;
    if df > 25_000.0 {
        return Ok(range_cdf(q, k));
    }

    // Integrate over u = s², whose density ∝ u^{df/2-1} exp(-df u / 4) after
    // scaling, in panels of width `panel`.
    let half_df = 0.5 * df;
    let panel: f64 = if df <= 100.0 {
        1.0
    } else if df <= 800.0 {
        0.5
    } else if df <= 5000.0 {
        0.25
    } else {
        0.125
    };
    let log_const = half_df * df.ln() - df * std::f64::consts::LN_2 - ln_gamma(half_df) + panel.ln();
    let quarter_df = 0.25 * df;

    let mut total = 0.0;
    let mut converged = false;
    for i in 1..=50 {
        let mid = (2 * i - 1) as f64 * panel;
        let mut panel_sum = 0.0;
        for (&x, &wt) in LEG16_X.iter().zip(&LEG16_W) {
            for u in [mid - x * panel, mid + x * panel] {
                let log_w = log_const + (half_df - 1.0) * u.ln() - u * quarter_df;
                if log_w >= -30.0 {
                    panel_sum += range_cdf(q * (0.5 * u).sqrt(), k) * wt * log_w.exp();
                }
            }
        }
        if i as f64 * panel >= 1.0 && panel_sum <= 1e-14 {
            converged = true;
            break;
        }
        total += panel_sum;
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "studentized range integral did not converge (q={q}, k={groups}, df={df})"
        )));
    }
    Ok(total.min(1.0))
}

/// P(Q > q) for the studentized range.
pub fn studentized_range_upper_tail(q: f64, groups: usize, df: f64) -> Result<f64> {
    Ok((1.0 - studentized_range_cdf(q, groups, df)?).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi2_known_values() {
        // P(χ²(2) > x) = exp(-x/2).
        for x in [0.1, 1.0, 5.0, 20.0] {
            assert!((chi2_upper_tail(x, 2.0) - (-x / 2.0_f64).exp()).abs() < 1e-14);
        }
        assert!((chi2_critical(6.0, 0.05).unwrap() - 12.591_587).abs() < 1e-5);
        assert!((chi2_critical(6.0, 0.005).unwrap() - 18.547_584).abs() < 1e-5);
        assert_eq!(chi2_upper_tail(0.0, 6.0), 1.0);
        assert!(chi2_critical(6.0, 0.0).is_err());
    }

    #[test]
    fn t_tail_matches_normal_for_large_df() {
        let p = t_two_sided(1.959_963_985, 1e7);
        assert!((p - 0.05).abs() < 1e-6, "{p}");
        assert_eq!(t_two_sided(0.0, 10.0), 1.0);
    }

    #[test]
    fn f_tail_matches_t_squared() {
        // F(1, d) = T(d)².
        for (t, d) in [(0.5, 5.0), (2.0, 30.0), (3.3, 700.0)] {
            assert!((f_upper_tail(t * t, 1.0, d) - t_two_sided(t, d)).abs() < 1e-12);
        }
    }

    #[test]
    fn two_group_range_is_scaled_t() {
        // Q(2, df) = √2 |T(df)|.
        for (q, df) in [(1.0, 10.0), (2.5, 20.0), (3.6, 120.0), (4.0, 700.0)] {
            let p = studentized_range_upper_tail(q, 2, df).unwrap();
            let expect = t_two_sided(q / std::f64::consts::SQRT_2, df);
            assert!((p - expect).abs() < 1e-8, "q={q} df={df}: {p} vs {expect}");
        }
    }

    #[test]
    fn tabulated_critical_values() {
        // Upper 5% points of the studentized range (standard tables).
        for (q, k, df) in [(3.877, 3, 10.0), (4.62, 7, 20.0), (4.17, 7, 1e6)] {
            let p = studentized_range_upper_tail(q, k, df).unwrap();
            assert!((p - 0.05).abs() < 5e-4, "k={k} df={df}: {p}");
        }
    }

    #[test]
    fn studentized_range_reference_points() {
        // Reference values from an independent implementation (SciPy).
        for (q, k, df, want) in [
            (3.5, 7, 723.0, 0.170_005_155_344_127_6),
            (2.0, 7, 100.0, 0.792_969_406_498_645_7),
            (5.0, 7, 30.0, 0.020_357_203_406_627_61),
        ] {
            let p = studentized_range_upper_tail(q, k, df).unwrap();
            assert!((p - want).abs() < 1e-6, "q={q} k={k} df={df}: {p} vs {want}");
        }
    }

    #[test]
    fn root_finder_errors_without_bracket() {
        assert!(find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        let r = find_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
