//! Calendar bookkeeping for daily event-count series.
//!
//! Weekdays are indexed Sunday = 0 through Saturday = 6 everywhere in this
//! crate, including every table and export.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DAYS_PER_WEEK: usize = 7;

pub const WEEKDAY_NAMES: [&str; DAYS_PER_WEEK] = ["Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"];

/// Canonical CSV header of a daily series.
pub const CSV_HEADER: [&str; 6] = [
    "date",
    "submitted",
    "accepted",
    "rejected",
    "desk_rejected",
    "withdrawn",
];

/// Weekday index of `date`, Sunday = 0.
pub fn weekday_of(date: NaiveDate) -> usize {
    date.weekday().num_days_from_sunday() as usize
}

/// Parse a weekday given either as its index (`0`..`6`) or its English name.
pub fn parse_weekday(s: &str) -> Result<usize> {
    if let Ok(k) = s.parse::<usize>() {
        if k < DAYS_PER_WEEK {
            return Ok(k);
        }
    }
    let lower = s.to_ascii_lowercase();
    WEEKDAY_NAMES
        .iter()
        .position(|name| lower.starts_with(&name.to_ascii_lowercase()))
        .ok_or_else(|| Error::Validation(format!("unknown weekday '{s}'")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventCategory {
    Submitted,
    Accepted,
    Rejected,
    DeskRejected,
    Withdrawn,
}

impl EventCategory {
    pub const ALL: [EventCategory; 5] = [
        EventCategory::Submitted,
        EventCategory::Accepted,
        EventCategory::Rejected,
        EventCategory::DeskRejected,
        EventCategory::Withdrawn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventCategory::Submitted => "submitted",
            EventCategory::Accepted => "accepted",
            EventCategory::Rejected => "rejected",
            EventCategory::DeskRejected => "desk_rejected",
            EventCategory::Withdrawn => "withdrawn",
        }
    }
}

impl fmt::Display for EventCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EventCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown event category '{s}'")))
    }
}

/// Counts recorded on a single day.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DayCounts {
    pub submitted: u32,
    pub accepted: u32,
    pub rejected: u32,
    pub desk_rejected: u32,
    pub withdrawn: u32,
}

impl DayCounts {
    pub fn get(&self, category: EventCategory) -> u32 {
        match category {
            EventCategory::Submitted => self.submitted,
            EventCategory::Accepted => self.accepted,
            EventCategory::Rejected => self.rejected,
            EventCategory::DeskRejected => self.desk_rejected,
            EventCategory::Withdrawn => self.withdrawn,
        }
    }

    /// `submitted == accepted + rejected + withdrawn`; desk rejections are a
    /// subset of rejections and do not enter the sum.
    pub fn is_consistent(&self) -> bool {
        u64::from(self.submitted)
            == u64::from(self.accepted) + u64::from(self.rejected) + u64::from(self.withdrawn)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DayRecord {
    pub date: NaiveDate,
    pub counts: DayCounts,
}

impl DayRecord {
    pub fn weekday(&self) -> usize {
        weekday_of(self.date)
    }
}

/// Anything that can hand out day records: a contiguous series or a
/// seasonal selection.
pub trait RecordSet {
    fn records(&self) -> Box<dyn Iterator<Item = DayRecord> + '_>;

    fn record_count(&self) -> usize;
}

/// Contiguous, validated daily counts starting at `start_date`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DailyEventSeries {
    start_date: NaiveDate,
    days: Vec<DayCounts>,
}

impl DailyEventSeries {
    /// Build a series, enforcing nonemptiness and the per-day sum identity.
    pub fn new(start_date: NaiveDate, days: Vec<DayCounts>) -> Result<Self> {
        if days.is_empty() {
            return Err(Error::EmptyInput("daily series has no days"));
        }
        let bad: Vec<NaiveDate> = days
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_consistent())
            .map(|(t, _)| start_date + Days::new(t as u64))
            .collect();
        if !bad.is_empty() {
            return Err(Error::Consistency { dates: bad });
        }
        if start_date
            .checked_add_days(Days::new(days.len() as u64 - 1))
            .is_none()
        {
            return Err(Error::Range("series extends past the calendar range".into()));
        }
        Ok(Self { start_date, days })
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    pub fn end_date(&self) -> NaiveDate {
        self.date_at(self.days.len() - 1)
    }

    /// Number of days t_M.
    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn date_at(&self, t: usize) -> NaiveDate {
        self.start_date + Days::new(t as u64)
    }

    pub fn weekday_at(&self, t: usize) -> usize {
        (weekday_of(self.start_date) + t) % DAYS_PER_WEEK
    }

    pub fn days(&self) -> &[DayCounts] {
        &self.days
    }

    /// The category as a real-valued sequence, one entry per day.
    pub fn values(&self, category: EventCategory) -> Vec<f64> {
        self.days.iter().map(|c| f64::from(c.get(category))).collect()
    }

    pub fn total(&self, category: EventCategory) -> u64 {
        self.days.iter().map(|c| u64::from(c.get(category))).sum()
    }

    /// Offset of `date` inside the window, if any.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let offset = (date - self.start_date).num_days();
        (offset >= 0 && (offset as usize) < self.days.len()).then_some(offset as usize)
    }

    /// Contiguous sub-series covering `[from, to]`, both inclusive.
    pub fn slice_window(&self, from: NaiveDate, to: NaiveDate) -> Result<Self> {
        if from > to {
            return Err(Error::Range(format!("window start {from} is after end {to}")));
        }
        let (Some(i), Some(j)) = (self.index_of(from), self.index_of(to)) else {
            return Err(Error::Range(format!(
                "window {from}..{to} not inside series {}..{}",
                self.start_date,
                self.end_date()
            )));
        };
        Ok(Self {
            start_date: from,
            days: self.days[i..=j].to_vec(),
        })
    }

    /// All day records whose month-day falls in any of `windows`, across
    /// every year of the series.
    pub fn seasonal_filter(&self, windows: &[(MonthDay, MonthDay)]) -> SeasonalRecords {
        let records = self
            .records()
            .filter(|r| {
                let md = MonthDay::from_date(r.date);
                windows.iter().any(|(from, to)| md.within(*from, *to))
            })
            .collect();
        SeasonalRecords { records }
    }

    /// Calendar years fully or partly covered by the series.
    pub fn years(&self) -> Vec<i32> {
        (self.start_date.year()..=self.end_date().year()).collect()
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    /// Parse the canonical CSV layout (see [`CSV_HEADER`]).
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(Error::Validation(format!(
                "expected header '{}', found '{}'",
                CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }

        let mut start: Option<NaiveDate> = None;
        let mut days = Vec::new();
        let mut inconsistent = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 1;
            let rec = rec?;
            if rec.len() != CSV_HEADER.len() {
                return Err(Error::Ingest {
                    row,
                    message: format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len()),
                });
            }
            let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d").map_err(|e| Error::Ingest {
                row,
                message: format!("bad date '{}': {e}", &rec[0]),
            })?;
            match start {
                None => start = Some(date),
                Some(s) => {
                    let expected = s + Days::new(days.len() as u64);
                    if date < expected {
                        return Err(Error::Ingest {
                            row,
                            message: format!("duplicate or out-of-order date {date}"),
                        });
                    }
                    if date > expected {
                        return Err(Error::Ingest {
                            row,
                            message: format!("gap: missing date {expected}"),
                        });
                    }
                }
            }
            let mut fields = [0u32; 5];
            for (k, slot) in fields.iter_mut().enumerate() {
                *slot = parse_count(&rec[k + 1], row, CSV_HEADER[k + 1])?;
            }
            let counts = DayCounts {
                submitted: fields[0],
                accepted: fields[1],
                rejected: fields[2],
                desk_rejected: fields[3],
                withdrawn: fields[4],
            };
            if !counts.is_consistent() {
                inconsistent.push(date);
            }
            days.push(counts);
        }
        if !inconsistent.is_empty() {
            return Err(Error::Consistency {
                dates: inconsistent,
            });
        }
        let start = start.ok_or(Error::EmptyInput("csv has no data rows"))?;
        Self::new(start, days)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for r in self.records() {
            let c = r.counts;
            w.write_record([
                r.date.to_string(),
                c.submitted.to_string(),
                c.accepted.to_string(),
                c.rejected.to_string(),
                c.desk_rejected.to_string(),
                c.withdrawn.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn parse_count(field: &str, row: usize, column: &str) -> Result<u32> {
    match field.parse::<i64>() {
        Ok(v) if v < 0 => Err(Error::Validation(format!(
            "row {row}: negative count {v} in column '{column}'"
        ))),
        Ok(v) => u32::try_from(v).map_err(|_| {
            Error::Validation(format!("row {row}: count {v} too large in column '{column}'"))
        }),
        Err(_) => Err(Error::Validation(format!(
            "row {row}: non-integer count '{field}' in column '{column}'"
        ))),
    }
}

impl RecordSet for DailyEventSeries {
    fn records(&self) -> Box<dyn Iterator<Item = DayRecord> + '_> {
        Box::new(self.days.iter().enumerate().map(|(t, &counts)| DayRecord {
            date: self.date_at(t),
            counts,
        }))
    }

    fn record_count(&self) -> usize {
        self.days.len()
    }
}

/// Day records picked out by a seasonal filter. Not contiguous: only
/// histogram-style operations accept it.
#[derive(Clone, Debug, PartialEq)]
pub struct SeasonalRecords {
    records: Vec<DayRecord>,
}

impl SeasonalRecords {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn as_slice(&self) -> &[DayRecord] {
        &self.records
    }
}

impl RecordSet for SeasonalRecords {
    fn records(&self) -> Box<dyn Iterator<Item = DayRecord> + '_> {
        Box::new(self.records.iter().copied())
    }

    fn record_count(&self) -> usize {
        self.records.len()
    }
}

/// A month-day pair, valid in at least one year (Feb 29 allowed).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthDay {
    pub month: u32,
    pub day: u32,
}

impl MonthDay {
    pub fn new(month: u32, day: u32) -> Result<Self> {
        // 2000 is a leap year, so Feb 29 validates.
        if NaiveDate::from_ymd_opt(2000, month, day).is_none() {
            return Err(Error::Validation(format!("invalid month-day {month:02}-{day:02}")));
        }
        Ok(Self { month, day })
    }

    pub fn from_date(date: NaiveDate) -> Self {
        Self {
            month: date.month(),
            day: date.day(),
        }
    }

    /// Inclusive membership; a window with `from > to` wraps over New Year.
    pub fn within(self, from: MonthDay, to: MonthDay) -> bool {
        if from <= to {
            from <= self && self <= to
        } else {
            self >= from || self <= to
        }
    }
}

impl FromStr for MonthDay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Validation(format!("month-day '{s}' is not MM-DD"));
        let (m, d) = s.split_once('-').ok_or_else(bad)?;
        let month = m.parse().map_err(|_| bad())?;
        let day = d.parse().map_err(|_| bad())?;
        MonthDay::new(month, day)
    }
}

impl fmt::Display for MonthDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}-{:02}", self.month, self.day)
    }
}

/// The July 01 - August 31 window.
pub fn vacation_window() -> (MonthDay, MonthDay) {
    (MonthDay { month: 7, day: 1 }, MonthDay { month: 8, day: 31 })
}

/// Per-weekday totals of one category.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeekdaySummary {
    pub category: EventCategory,
    pub totals: [u64; DAYS_PER_WEEK],
    /// How many of each weekday occur in the record set.
    pub occurrences: [u64; DAYS_PER_WEEK],
    /// `totals / occurrences`; 0 where a weekday never occurs.
    pub means: [f64; DAYS_PER_WEEK],
}

impl WeekdaySummary {
    pub fn total(&self) -> u64 {
        self.totals.iter().sum()
    }

    pub fn days(&self) -> u64 {
        self.occurrences.iter().sum()
    }

    /// Weekday with the largest total; ties go to the earliest index.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for k in 1..DAYS_PER_WEEK {
            if self.totals[k] > self.totals[best] {
                best = k;
            }
        }
        best
    }
}

pub fn weekday_totals(records: &impl RecordSet, category: EventCategory) -> Result<WeekdaySummary> {
    if records.record_count() == 0 {
        return Err(Error::EmptyInput("no day records to summarize"));
    }
    let mut totals = [0u64; DAYS_PER_WEEK];
    let mut occurrences = [0u64; DAYS_PER_WEEK];
    for r in records.records() {
        let k = r.weekday();
        totals[k] += u64::from(r.counts.get(category));
        occurrences[k] += 1;
    }
    let mut means = [0.0; DAYS_PER_WEEK];
    for k in 0..DAYS_PER_WEEK {
        if occurrences[k] > 0 {
            means[k] = totals[k] as f64 / occurrences[k] as f64;
        }
    }
    Ok(WeekdaySummary {
        category,
        totals,
        occurrences,
        means,
    })
}
