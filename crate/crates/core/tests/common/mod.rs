#![allow(dead_code)]

use chrono::NaiveDate;
use dow_core::synth::{generate, SplitMix64, SynthConfig};
use dow_core::DailyEventSeries;

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

/// Zeller's congruence, converted to Sunday = 0.
pub fn zeller_weekday(y: i32, m: u32, d: u32) -> usize {
    let (mut y, mut m) = (i64::from(y), i64::from(m));
    if m < 3 {
        m += 12;
        y -= 1;
    }
    let k = y.rem_euclid(100);
    let j = y.div_euclid(100);
    let h = (i64::from(d) + (13 * (m + 1)) / 5 + k + k / 4 + j / 4 + 5 * j).rem_euclid(7);
    // h: 0 = Saturday, 1 = Sunday, ...
    ((h + 6) % 7) as usize
}

/// Synthetic series with random weekday rates drawn from `rng`.
pub fn random_series(rng: &mut SplitMix64, n_days: usize) -> DailyEventSeries {
    let mut cfg = SynthConfig::paper_shaped(rng.next_u64());
    cfg.n_days = n_days;
    for k in 0..7 {
        cfg.weekday_rates[k] = 0.2 + 3.0 * rng.next_f64();
        cfg.accept_prob[k] = rng.next_f64();
        cfg.desk_reject_frac[k] = rng.next_f64();
    }
    let offset = (rng.next_u64() % 3000) as u64;
    cfg.start_date = date(2000, 1, 1) + chrono::Days::new(offset);
    generate(&cfg).unwrap()
}

/// Direct per-weekday means of a category, without the library's summary.
pub fn brute_weekday_means(series: &DailyEventSeries, category: dow_core::EventCategory) -> [f64; 7] {
    let mut sums = [0.0; 7];
    let mut counts = [0.0; 7];
    for t in 0..series.len() {
        let d = series.date_at(t);
        use chrono::Datelike;
        let k = zeller_weekday(d.year(), d.month(), d.day());
        sums[k] += f64::from(series.days()[t].get(category));
        counts[k] += 1.0;
    }
    let mut means = [0.0; 7];
    for k in 0..7 {
        if counts[k] > 0.0 {
            means[k] = sums[k] / counts[k];
        }
    }
    means
}

/// Series of `n` days with given per-day submitted counts, all accepted.
pub fn submitted_only(start: NaiveDate, counts: &[u32]) -> DailyEventSeries {
    let days = counts
        .iter()
        .map(|&s| dow_core::DayCounts { submitted: s, accepted: s, ..Default::default() })
        .collect();
    DailyEventSeries::new(start, days).unwrap()
}
