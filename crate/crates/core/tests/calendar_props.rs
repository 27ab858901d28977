mod common;

use chrono::{Datelike, Days};
use common::{date, random_series, zeller_weekday};
use dow_core::calendar::{vacation_window, weekday_of, weekday_totals, CSV_HEADER};
use dow_core::synth::SplitMix64;
use dow_core::{DailyEventSeries, DayCounts, EventCategory};
use proptest::prelude::*;

#[test]
fn weekday_matches_zeller_on_random_dates() {
    let mut rng = SplitMix64::new(2024);
    let base = date(1600, 3, 1);
    for _ in 0..10_000 {
        let d = base + Days::new(rng.next_u64() % 250_000);
        assert_eq!(weekday_of(d), zeller_weekday(d.year(), d.month(), d.day()), "{d}");
    }
    assert_eq!(zeller_weekday(2013, 1, 1), 2);
    assert_eq!(zeller_weekday(2014, 12, 31), 3);
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn weekday_is_seven_periodic(offset in 0u64..200_000) {
        let d = date(1900, 1, 1) + Days::new(offset);
        prop_assert_eq!(weekday_of(d + Days::new(7)), weekday_of(d));
    }

    #[test]
    fn csv_round_trip(seed in any::<u64>(), n in 1usize..60) {
        let mut rng = SplitMix64::new(seed);
        let s = random_series(&mut rng, n);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        prop_assert_eq!(DailyEventSeries::from_csv_reader(buf.as_slice()).unwrap(), s);
    }
}

#[test]
fn totals_sum_to_category_total() {
    let mut rng = SplitMix64::new(7);
    for _ in 0..50 {
        let n = 1 + (rng.next_u64() % 900) as usize;
        let s = random_series(&mut rng, n);
        for cat in EventCategory::ALL {
            let w = weekday_totals(&s, cat).unwrap();
            assert_eq!(w.total(), s.total(cat));
            assert_eq!(w.days(), s.len() as u64);
            for k in 0..7 {
                if w.occurrences[k] > 0 {
                    assert!((w.means[k] * w.occurrences[k] as f64 - w.totals[k] as f64).abs() < 1e-9);
                }
            }
        }
        assert!(s.days().iter().all(DayCounts::is_consistent));
    }
}

#[test]
fn slice_then_summarize_matches_direct() {
    let mut rng = SplitMix64::new(11);
    let s = random_series(&mut rng, 730);
    for _ in 0..30 {
        let a = (rng.next_u64() % 730) as usize;
        let b = a + (rng.next_u64() % (730 - a as u64)) as usize;
        let sliced = s.slice_window(s.date_at(a), s.date_at(b)).unwrap();
        let direct = DailyEventSeries::new(s.date_at(a), s.days()[a..=b].to_vec()).unwrap();
        for cat in EventCategory::ALL {
            assert_eq!(
                weekday_totals(&sliced, cat).unwrap(),
                weekday_totals(&direct, cat).unwrap()
            );
        }
    }
}

/// 730 rows over 2013–2014 whose column sums are (597, 265, 328, 161, 4).
fn two_year_csv() -> String {
    let mut out = CSV_HEADER.join(",") + "\n";
    let (mut acc, mut rej, mut desk, mut wd) = (265u32, 328u32, 161u32, 4u32);
    for t in 0..730u64 {
        let d = date(2013, 1, 1) + Days::new(t);
        let a = u32::from(acc > 0);
        acc -= a;
        let r = u32::from(rej > 0);
        rej -= r;
        let dr = u32::from(r == 1 && desk > 0);
        desk -= dr;
        let w = u32::from(wd > 0 && t % 100 == 99);
        wd -= w;
        out += &format!("{d},{},{a},{r},{dr},{w}\n", a + r + w);
    }
    out
}

#[test]
fn load_two_year_sums() {
    let s = DailyEventSeries::from_csv_reader(two_year_csv().as_bytes()).unwrap();
    assert_eq!(s.len(), 730);
    assert_eq!(s.start_date(), date(2013, 1, 1));
    assert_eq!(s.end_date(), date(2014, 12, 31));
    let sums: Vec<u64> = EventCategory::ALL.iter().map(|&c| s.total(c)).collect();
    assert_eq!(sums, vec![597, 265, 328, 161, 4]);
}

#[test]
fn vacation_histogram_counts_days() {
    let s = common::submitted_only(date(2013, 1, 1), &[1; 730]);
    let summer = s.seasonal_filter(&[vacation_window()]);
    assert_eq!(summer.len(), 124);
    let w = weekday_totals(&summer, EventCategory::Submitted).unwrap();
    assert_eq!(w.total(), 124);
    assert!(summer.as_slice().iter().all(|r| r.date.month() == 7 || r.date.month() == 8));
}
