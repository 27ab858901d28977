//! Detection and modelling of day-of-week effects in daily event counts.
//!
//! The crate covers the whole pipeline for submission/acceptance/rejection
//! streams: calendar bookkeeping and CSV ingestion ([`calendar`]), summary
//! moments, χ² uniformity and periodograms ([`descriptives`]), distribution
//! fitting and Tukey comparisons ([`distfit`]), weekday dummy regressions
//! ([`regression`]), Granger causality ([`granger`]) and a seeded synthetic
//! generator ([`synth`]).

pub mod calendar;
pub mod descriptives;
pub mod distfit;
pub mod error;
pub mod granger;
pub mod linalg;
pub mod regression;
pub mod special;
pub mod synth;

pub use calendar::{
    weekday_of, weekday_totals, DailyEventSeries, DayCounts, DayRecord, EventCategory, MonthDay,
    RecordSet, SeasonalRecords, WeekdaySummary, DAYS_PER_WEEK, WEEKDAY_NAMES,
};
pub use error::{Error, ErrorClass, Result};
