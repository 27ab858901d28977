//! Decision-day analysis of desk rejections per editor group.

use std::collections::BTreeSet;

use anyhow::Context;
use chrono::NaiveDate;
use serde::Serialize;

use dow_core::calendar::vacation_window;
use dow_core::distfit::{exp_decay_fit, FitReport};
use dow_core::{weekday_of, Error, EventCategory, MonthDay, WeekdaySummary, DAYS_PER_WEEK, WEEKDAY_NAMES};

use crate::manifest::{RunManifest, Window};
use crate::output::{csv_writer, opt, write_json};
use crate::report::SCHEMA_VERSION;
use crate::DeskrejectArgs;

pub const GROUPS: [&str; 3] = ["OC", "ACBCCE", "OTHER"];
const HEADER: [&str; 3] = ["date", "editor_group", "desk_rejections"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionRow {
    pub date: NaiveDate,
    pub group: usize,
    pub count: u32,
}

#[derive(Serialize)]
pub struct GroupHistogram {
    pub group: &'static str,
    pub totals: [u64; DAYS_PER_WEEK],
    pub total: u64,
    /// Share of the pooled total.
    pub share: f64,
}

#[derive(Serialize)]
pub struct DecayFit {
    pub fit: Option<FitReport>,
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct ScopeResult {
    pub scope: &'static str,
    pub days: usize,
    pub groups: Vec<GroupHistogram>,
    pub pooled: WeekdaySummary,
    pub decay: DecayFit,
}

#[derive(Serialize)]
pub struct DeskRejectReport {
    pub schema_version: &'static str,
    pub manifest: RunManifest,
    pub full: ScopeResult,
    pub vacation: Option<ScopeResult>,
}

pub fn parse_rows(bytes: &[u8]) -> Result<Vec<DecisionRow>, Error> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::Ingest {
            row: 1,
            message: format!("expected header {}, found {}", HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record?;
        let field = |k: usize| record.get(k).unwrap_or("");
        let date = NaiveDate::parse_from_str(field(0), "%Y-%m-%d").map_err(|e| Error::Ingest {
            row,
            message: format!("bad date '{}': {e}", field(0)),
        })?;
        let group = GROUPS
            .iter()
            .position(|g| *g == field(1))
            .ok_or_else(|| Error::Validation(format!("row {row}: unknown editor group '{}' (expected OC, ACBCCE or OTHER)", field(1))))?;
        let count: u32 = field(2).parse().map_err(|_| Error::Ingest {
            row,
            message: format!("desk_rejections '{}' is not a nonnegative integer", field(2)),
        })?;
        if !seen.insert((date, group)) {
            return Err(Error::Ingest {
                row,
                message: format!("duplicate row for {date} and group {}", GROUPS[group]),
            });
        }
        rows.push(DecisionRow { date, group, count });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("no decision-day rows"));
    }
    Ok(rows)
}

pub fn analyze(scope: &'static str, rows: &[&DecisionRow]) -> ScopeResult {
    let mut per_group = [[0u64; DAYS_PER_WEEK]; 3];
    let mut dates = BTreeSet::new();
    for r in rows {
        per_group[r.group][weekday_of(r.date)] += u64::from(r.count);
        dates.insert(r.date);
    }
    let mut occurrences = [0u64; DAYS_PER_WEEK];
    for d in &dates {
        occurrences[weekday_of(*d)] += 1;
    }
    let totals: [u64; DAYS_PER_WEEK] = std::array::from_fn(|k| per_group.iter().map(|g| g[k]).sum());
    let pooled_total: u64 = totals.iter().sum();
    let groups = GROUPS
        .iter()
        .zip(per_group)
        .map(|(&group, totals)| {
            let total = totals.iter().sum();
            GroupHistogram {
                group,
                totals,
                total,
                share: if pooled_total > 0 { total as f64 / pooled_total as f64 } else { 0.0 },
            }
        })
        .collect();
    let pooled = WeekdaySummary {
        category: EventCategory::DeskRejected,
        totals,
        occurrences,
        means: std::array::from_fn(|k| {
            if occurrences[k] > 0 {
                totals[k] as f64 / occurrences[k] as f64
            } else {
                0.0
            }
        }),
    };
    let decay = match exp_decay_fit(&pooled) {
        Ok(fit) => DecayFit { fit: Some(fit), note: None },
        Err(e) => DecayFit { fit: None, note: Some(e.to_string()) },
    };
    ScopeResult {
        scope,
        days: dates.len(),
        groups,
        pooled,
        decay,
    }
}

pub fn build(args: &DeskrejectArgs) -> anyhow::Result<DeskRejectReport> {
    let mut manifest = RunManifest::new("deskreject");
    let bytes = manifest.add_input(&args.input)?;
    let rows = parse_rows(&bytes).with_context(|| format!("loading {}", args.input.display()))?;
    manifest.window = args.window.map(|(from, to)| Window { from, to });
    manifest.param("format", args.format);

    let in_window: Vec<&DecisionRow> = rows
        .iter()
        .filter(|r| args.window.is_none_or(|(from, to)| r.date >= from && r.date <= to))
        .collect();
    if in_window.is_empty() {
        return Err(Error::EmptyInput("no decision-day rows inside the window").into());
    }
    let (vf, vt) = vacation_window();
    let vacation_rows: Vec<&DecisionRow> = in_window
        .iter()
        .copied()
        .filter(|r| MonthDay::from_date(r.date).within(vf, vt))
        .collect();
    Ok(DeskRejectReport {
        schema_version: SCHEMA_VERSION,
        manifest,
        full: analyze("full", &in_window),
        vacation: (!vacation_rows.is_empty()).then(|| analyze("vacation", &vacation_rows)),
    })
}

pub fn run(args: &DeskrejectArgs) -> anyhow::Result<()> {
    let report = build(args)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    if args.format.json() {
        write_json(&args.out, "deskreject.json", &report)?;
    }
    if args.format.csv() {
        write_json(&args.out, "manifest.json", &report.manifest)?;
        let scopes: Vec<&ScopeResult> = std::iter::once(&report.full).chain(report.vacation.as_ref()).collect();

        let mut w = csv_writer(&args.out, "deskreject_histograms.csv")?;
        let mut header: Vec<String> = vec!["scope".into(), "group".into()];
        header.extend(WEEKDAY_NAMES.iter().map(|s| s.to_string()));
        header.extend(["total".into(), "share".into()]);
        w.write_record(&header)?;
        for s in &scopes {
            for g in &s.groups {
                let mut rec = vec![s.scope.to_string(), g.group.to_string()];
                rec.extend(g.totals.iter().map(u64::to_string));
                rec.extend([g.total.to_string(), format!("{:.4}", g.share)]);
                w.write_record(&rec)?;
            }
            let mut rec = vec![s.scope.to_string(), "pooled".to_string()];
            rec.extend(s.pooled.totals.iter().map(u64::to_string));
            rec.extend([s.pooled.total().to_string(), "1.0000".to_string()]);
            w.write_record(&rec)?;
        }
        w.flush()?;

        let mut w = csv_writer(&args.out, "deskreject_fits.csv")?;
        w.write_record(["scope", "amplitude", "slope", "relaxation_time", "r_squared", "non_decaying", "note"])?;
        for s in &scopes {
            let f = s.decay.fit.as_ref();
            w.write_record([
                s.scope.to_string(),
                opt(f.and_then(|f| f.param("amplitude"))),
                opt(f.and_then(|f| f.param("slope"))),
                opt(f.and_then(|f| f.param("relaxation_time"))),
                opt(f.and_then(|f| f.r_squared)),
                f.map(|f| f.non_decaying.to_string()).unwrap_or_default(),
                s.decay.note.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
    }
    Ok(())
}
