//! Summary moments, ratio series, χ² uniformity tests and the periodogram.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;

use crate::calendar::{
    DailyEventSeries, EventCategory, RecordSet, WeekdaySummary, DAYS_PER_WEEK,
};
use crate::error::{Error, Result};
use crate::special::chi2_upper_tail;

/// Sample moments of a real sequence.
///
/// `std_dev` uses the n-1 denominator, `skewness` is the adjusted
/// Fisher-Pearson coefficient G1 and `kurtosis` is the bias-adjusted excess
/// kurtosis G2. Both shape fields are `None` when the variance is zero or
/// the sample is too small (n < 3 for G1, n < 4 for G2).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentsReport {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub sum: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub std_err: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
}

pub fn moments(values: &[f64]) -> Result<MomentsReport> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            what: "moments",
            needed: 2,
            got: n,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("moments of non-finite values".into()));
    }

    // Single-pass central moment accumulation (Terriberry's update).
    let (mut mean, mut m2, mut m3, mut m4) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for (i, &x) in values.iter().enumerate() {
        let k = (i + 1) as f64;
        let delta = x - mean;
        let delta_n = delta / k;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * (k - 1.0);
        mean += delta_n;
        m4 += term1 * delta_n2 * (k * k - 3.0 * k + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
        m3 += term1 * delta_n * (k - 2.0) - 3.0 * delta_n * m2;
        m2 += term1;
        min = min.min(x);
        max = max.max(x);
        sum += x;
    }

    let nf = n as f64;
    let variance = m2 / (nf - 1.0);
    let std_dev = variance.sqrt();
    let spread = m2 > f64::EPSILON * f64::EPSILON * nf * mean.abs().max(1.0).powi(2);
    let g1 = (m3 / nf) / (m2 / nf).powf(1.5);
    let g2 = (m4 / nf) / (m2 / nf).powi(2) - 3.0;
    let skewness = (spread && n >= 3).then(|| (nf * (nf - 1.0)).sqrt() / (nf - 2.0) * g1);
    let kurtosis = (spread && n >= 4)
        .then(|| (nf - 1.0) / ((nf - 2.0) * (nf - 3.0)) * ((nf + 1.0) * g2 + 6.0));

    Ok(MomentsReport {
        n,
        min,
        max,
        sum,
        mean: mean.clamp(min, max),
        std_dev,
        std_err: std_dev / nf.sqrt(),
        skewness,
        kurtosis,
    })
}

/// What to do with days whose ratio denominator is zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroDenominator {
    /// Record the day with ratio 0.
    #[default]
    ZeroFill,
    /// Drop the day from the ratio sequence.
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSeries {
    pub numerator: EventCategory,
    pub denominator: EventCategory,
    pub values: Vec<f64>,
    /// Day offsets whose denominator was zero.
    pub zero_denominator_days: Vec<usize>,
}

pub fn ratio_daily(
    series: &DailyEventSeries,
    numerator: EventCategory,
    denominator: EventCategory,
    policy: ZeroDenominator,
) -> RatioSeries {
    let mut values = Vec::with_capacity(series.len());
    let mut zero_denominator_days = Vec::new();
    for (t, c) in series.days().iter().enumerate() {
        let (num, den) = (c.get(numerator), c.get(denominator));
        if den == 0 {
            zero_denominator_days.push(t);
            if policy == ZeroDenominator::ZeroFill {
                values.push(0.0);
            }
        } else {
            values.push(f64::from(num) / f64::from(den));
        }
    }
    RatioSeries {
        numerator,
        denominator,
        values,
        zero_denominator_days,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chi2Report {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub expected: [f64; DAYS_PER_WEEK],
    pub observed: [u64; DAYS_PER_WEEK],
    pub weighted: bool,
    /// Set when some expected cell is below 1 and the test is unreliable.
    pub low_expected_warning: bool,
}

impl Chi2Report {
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// χ² test of the weekday totals against a uniform weekday distribution.
///
/// Unweighted: each weekday expects total/7. Weighted: each weekday expects
/// total · occurrences[k] / days, accounting for weekdays that occur more
/// often in the window.
pub fn chi2_uniform(summary: &WeekdaySummary, weighted: bool) -> Result<Chi2Report> {
    let total = summary.total();
    if total == 0 {
        return Err(Error::EmptyInput("chi2 test on zero total"));
    }
    let total = total as f64;
    let days = summary.days() as f64;
    let mut expected = [0.0; DAYS_PER_WEEK];
    for (k, e) in expected.iter_mut().enumerate() {
        *e = if weighted {
            total * summary.occurrences[k] as f64 / days
        } else {
            total / DAYS_PER_WEEK as f64
        };
    }
    let statistic: f64 = summary
        .totals
        .iter()
        .zip(&expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let df = DAYS_PER_WEEK - 1;
    Ok(Chi2Report {
        statistic,
        df,
        p_value: chi2_upper_tail(statistic, df as f64),
        expected,
        observed: summary.totals,
        weighted,
        low_expected_warning: expected.iter().any(|&e| e < 1.0),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Periodogram {
    pub n: usize,
    /// Fourier frequencies j/n in cycles per day, j = 1..n/2.
    pub frequencies: Vec<f64>,
    pub powers: Vec<f64>,
    pub peak_frequency: f64,
    pub peak_power: f64,
}

impl Periodogram {
    /// Population variance implied by the one-sided spectrum: interior
    /// frequencies count twice, Nyquist (even n) once.
    pub fn total_power(&self) -> f64 {
        let nyquist = (self.n % 2 == 0).then(|| self.powers.len() - 1);
        let s: f64 = self
            .powers
            .iter()
            .enumerate()
            .map(|(i, &p)| if Some(i) == nyquist { p } else { 2.0 * p })
            .sum();
        s / self.n as f64
    }

    pub fn median_power(&self) -> f64 {
        let mut p = self.powers.clone();
        p.sort_by(f64::total_cmp);
        let m = p.len();
        if m % 2 == 1 {
            p[m / 2]
        } else {
            0.5 * (p[m / 2 - 1] + p[m / 2])
        }
    }
}

pub const MIN_PERIODOGRAM_LEN: usize = 16;

/// Schuster periodogram of the mean-removed sequence:
/// I(j/n) = |Σ_t (x_t - x̄) e^{-2πi jt/n}|² / n.
pub fn periodogram(values: &[f64]) -> Result<Periodogram> {
    let n = values.len();
    if n < MIN_PERIODOGRAM_LEN {
        return Err(Error::InsufficientData {
            what: "periodogram",
            needed: MIN_PERIODOGRAM_LEN,
            got: n,
        });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let frequencies: Vec<f64> = (1..=half).map(|j| j as f64 / n as f64).collect();
    let powers: Vec<f64> = (1..=half).map(|j| buf[j].norm_sqr() / n as f64).collect();
    let mut peak = 0;
    for (i, &p) in powers.iter().enumerate() {
        if p > powers[peak] {
            peak = i;
        }
    }
    Ok(Periodogram {
        n,
        peak_frequency: frequencies[peak],
        peak_power: powers[peak],
        frequencies,
        powers,
    })
}

/// Periodogram of one category; the record set must be date-contiguous.
pub fn periodogram_of(records: &impl RecordSet, category: EventCategory) -> Result<Periodogram> {
    let mut prev = None;
    let mut values = Vec::with_capacity(records.record_count());
    for r in records.records() {
        if let Some(p) = prev {
            if r.date != p + chrono::Days::new(1) {
                return Err(Error::Contract(format!(
                    "periodogram needs contiguous days; {p} is followed by {}",
                    r.date
                )));
            }
        }
        prev = Some(r.date);
        values.push(f64::from(r.counts.get(category)));
    }
    periodogram(&values)
}
