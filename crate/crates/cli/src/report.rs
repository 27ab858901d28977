use std::path::Path;

use anyhow::Context;
use chrono::NaiveDate;
use serde::Serialize;

use dow_core::descriptives::{
    chi2_uniform, moments, periodogram, ratio_daily, Chi2Report, MomentsReport, Periodogram, RatioSeries,
    ZeroDenominator,
};
use dow_core::distfit::{
    exp_decay_fit, positive_part, tukey_pairwise, weekday_groups, weibull_mle, weibull_ppcc, FitReport,
    TukeyReport,
};
use dow_core::granger::{granger_table, write_table_csv, GrangerReport};
use dow_core::regression::{format_4dp, strong_model, variance, weak_model, BetaMatrix, VarianceConvention, WeakModelResult};
use dow_core::{
    calendar::vacation_window, weekday_totals, DailyEventSeries, EventCategory, WeekdaySummary,
    DAYS_PER_WEEK, WEEKDAY_NAMES,
};

use crate::manifest::{RunManifest, Window};
use crate::output::{csv_writer, num, opt, write_json};
use crate::{InvalidInput, ReportArgs};

pub const SCHEMA_VERSION: &str = "1.0.0";

const CORE: [EventCategory; 3] = [EventCategory::Submitted, EventCategory::Accepted, EventCategory::Rejected];
const RATIOS: [(EventCategory, EventCategory); 3] = [
    (EventCategory::Accepted, EventCategory::Submitted),
    (EventCategory::Rejected, EventCategory::Submitted),
    (EventCategory::Accepted, EventCategory::Rejected),
];

#[derive(Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub manifest: RunManifest,
    pub window: WindowInfo,
    pub moments_table: Vec<MomentsColumn>,
    pub chi2: Vec<Chi2Row>,
    pub weekday_histograms: Vec<WeekdaySummary>,
    pub periodogram: PeriodogramSection,
    pub granger: Vec<GrangerRow>,
    pub beta_matrices: Vec<BetaMatrix>,
    pub weak_models: Vec<WeakModelResult>,
    pub interval_variances: Vec<VarianceRow>,
    pub vacation: Option<VacationSection>,
    pub decay_fits: Vec<DecayRow>,
    pub distribution: DistributionSection,
}

#[derive(Serialize)]
pub struct WindowInfo {
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub days: usize,
}

/// One column of the moments table: a raw category or a daily ratio.
#[derive(Serialize)]
pub struct MomentsColumn {
    pub name: String,
    pub zero_denominator_days: Option<usize>,
    pub moments: MomentsReport,
}

#[derive(Serialize)]
pub struct Chi2Row {
    pub scope: String,
    pub category: EventCategory,
    pub alpha: f64,
    pub rejects_uniform: bool,
    #[serde(flatten)]
    pub report: Chi2Report,
}

#[derive(Serialize)]
pub struct PeriodogramSection {
    pub category: EventCategory,
    #[serde(flatten)]
    pub spectrum: Periodogram,
}

#[derive(Serialize)]
pub struct GrangerRow {
    pub direction: String,
    pub stars: &'static str,
    #[serde(flatten)]
    pub report: GrangerReport,
}

#[derive(Serialize)]
pub struct VarianceRow {
    pub scope: String,
    pub category: EventCategory,
    pub from: NaiveDate,
    pub to: NaiveDate,
    pub population: f64,
    pub sample: f64,
}

#[derive(Serialize)]
pub struct VacationSection {
    pub from: String,
    pub to: String,
    pub days: usize,
    pub histograms: Vec<WeekdaySummary>,
}

#[derive(Serialize)]
pub struct DecayRow {
    pub scope: String,
    pub category: EventCategory,
    pub fit: Option<FitReport>,
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct DistributionSection {
    pub category: EventCategory,
    pub positive_days: usize,
    pub zero_fraction: f64,
    pub ppcc_best_shape: Option<f64>,
    pub ppcc_best: Option<f64>,
    pub weibull_mle: Option<FitReport>,
    pub tukey: Option<TukeyReport>,
    pub notes: Vec<String>,
}

fn ratio_name(num: EventCategory, den: EventCategory) -> String {
    format!("{num}/{den}")
}

/// Per-calendar-year sub-windows clipped to the series.
fn year_scopes(series: &DailyEventSeries) -> Vec<(String, NaiveDate, NaiveDate)> {
    series
        .years()
        .into_iter()
        .map(|y| {
            let from = NaiveDate::from_ymd_opt(y, 1, 1).expect("valid date").max(series.start_date());
            let to = NaiveDate::from_ymd_opt(y, 12, 31).expect("valid date").min(series.end_date());
            (y.to_string(), from, to)
        })
        .collect()
}

pub fn build(args: &ReportArgs) -> anyhow::Result<(Report, Vec<RatioSeries>, DailyEventSeries)> {
    if args.lags == 0 {
        return Err(InvalidInput("--lags must be at least 1".into()).into());
    }
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(InvalidInput(format!("--alpha {} is not in (0, 1)", args.alpha)).into());
    }

    let mut manifest = RunManifest::new("report");
    let bytes = manifest.add_input(&args.input)?;
    let full = DailyEventSeries::from_csv_reader(bytes.as_slice())
        .with_context(|| format!("loading {}", args.input.display()))?;
    let series = match args.window {
        Some((from, to)) => full.slice_window(from, to)?,
        None => full,
    };
    manifest.window = args.window.map(|(from, to)| Window { from, to });
    manifest.param("category", args.category);
    manifest.param("lags", args.lags);
    manifest.param("alpha", args.alpha);
    manifest.param("chi2_weighted", args.chi2_weighted);
    manifest.param("format", args.format);
    manifest.param("zero_denominator", ZeroDenominator::ZeroFill);
    manifest.param("variance_convention", VarianceConvention::Population);
    manifest.seed = args.seed;

    let mut moments_table = Vec::new();
    for cat in CORE {
        moments_table.push(MomentsColumn {
            name: cat.to_string(),
            zero_denominator_days: None,
            moments: moments(&series.values(cat))?,
        });
    }
    let ratios: Vec<RatioSeries> = RATIOS
        .iter()
        .map(|&(n, d)| ratio_daily(&series, n, d, ZeroDenominator::ZeroFill))
        .collect();
    for r in &ratios {
        moments_table.push(MomentsColumn {
            name: ratio_name(r.numerator, r.denominator),
            zero_denominator_days: Some(r.zero_denominator_days.len()),
            moments: moments(&r.values)?,
        });
    }

    let mut scopes = vec![("full".to_string(), series.start_date(), series.end_date())];
    scopes.extend(year_scopes(&series));
    let mut chi2 = Vec::new();
    let mut interval_variances = Vec::new();
    for (scope, from, to) in &scopes {
        let sub = series.slice_window(*from, *to)?;
        for cat in CORE {
            let summary = weekday_totals(&sub, cat)?;
            if summary.total() > 0 {
                let report = chi2_uniform(&summary, args.chi2_weighted)?;
                chi2.push(Chi2Row {
                    scope: scope.clone(),
                    category: cat,
                    alpha: args.alpha,
                    rejects_uniform: report.rejects_at(args.alpha),
                    report,
                });
            }
            if sub.len() >= 2 {
                let values = sub.values(cat);
                interval_variances.push(VarianceRow {
                    scope: scope.clone(),
                    category: cat,
                    from: *from,
                    to: *to,
                    population: variance(&values, VarianceConvention::Population)?,
                    sample: variance(&values, VarianceConvention::Sample)?,
                });
            }
        }
    }

    let weekday_histograms = EventCategory::ALL
        .iter()
        .map(|&c| weekday_totals(&series, c))
        .collect::<Result<Vec<_>, _>>()?;

    let periodogram = PeriodogramSection {
        category: args.category,
        spectrum: periodogram(&series.values(args.category))?,
    };

    let granger = granger_table(&series, args.lags)?
        .into_iter()
        .map(|report| GrangerRow {
            direction: report.direction_label(),
            stars: report.stars(),
            report,
        })
        .collect();

    let beta_matrices = CORE
        .iter()
        .map(|&c| strong_model(&series, c))
        .collect::<Result<Vec<_>, _>>()?;
    let weak_models = (0..DAYS_PER_WEEK)
        .map(|d| weak_model(&series, args.category, d))
        .collect::<Result<Vec<_>, _>>()?;

    let (vac_from, vac_to) = vacation_window();
    let vac = series.seasonal_filter(&[(vac_from, vac_to)]);
    let vacation = if vac.is_empty() {
        None
    } else {
        Some(VacationSection {
            from: vac_from.to_string(),
            to: vac_to.to_string(),
            days: vac.len(),
            histograms: EventCategory::ALL
                .iter()
                .map(|&c| weekday_totals(&vac, c))
                .collect::<Result<Vec<_>, _>>()?,
        })
    };

    let mut decay_fits = Vec::new();
    let mut push_decay = |scope: &str, summary: &WeekdaySummary| {
        let (fit, note) = match exp_decay_fit(summary) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        decay_fits.push(DecayRow {
            scope: scope.to_string(),
            category: summary.category,
            fit,
            note,
        });
    };
    let dr = EventCategory::DeskRejected;
    push_decay("full", &weekday_totals(&series, dr)?);
    if let Some(v) = &vacation {
        if let Some(h) = v.histograms.iter().find(|h| h.category == dr) {
            push_decay("vacation", h);
        }
    }

    let distribution = distribution_section(&series, args.category);

    let report = Report {
        schema_version: SCHEMA_VERSION,
        manifest,
        window: WindowInfo {
            from: series.start_date(),
            to: series.end_date(),
            days: series.len(),
        },
        moments_table,
        chi2,
        weekday_histograms,
        periodogram,
        granger,
        beta_matrices,
        weak_models,
        interval_variances,
        vacation,
        decay_fits,
        distribution,
    };
    Ok((report, ratios, series))
}

/// Shape diagnostics are descriptive; failures become notes, not errors.
fn distribution_section(series: &DailyEventSeries, category: EventCategory) -> DistributionSection {
    let (positive, zero_fraction) = positive_part(&series.values(category));
    let mut notes = Vec::new();
    let ppcc = weibull_ppcc(&positive)
        .map_err(|e| notes.push(format!("ppcc: {e}")))
        .ok();
    let weibull_mle = weibull_mle(&positive)
        .map_err(|e| notes.push(format!("weibull_mle: {e}")))
        .ok();
    let tukey = tukey_pairwise(&weekday_groups(series, category))
        .map_err(|e| notes.push(format!("tukey: {e}")))
        .ok();
    DistributionSection {
        category,
        positive_days: positive.len(),
        zero_fraction,
        ppcc_best_shape: ppcc.as_ref().map(|c| c.best_shape),
        ppcc_best: ppcc.as_ref().map(|c| c.best_ppcc),
        weibull_mle,
        tukey,
        notes,
    }
}

pub fn run(args: &ReportArgs) -> anyhow::Result<()> {
    let (report, ratios, series) = build(args)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    if args.format.json() {
        write_json(&args.out, "report.json", &report)?;
    }
    if args.format.csv() {
        write_json(&args.out, "manifest.json", &report.manifest)?;
        write_csv_bundle(&args.out, &report, &ratios, &series)?;
    }
    Ok(())
}

fn summary_header() -> Vec<String> {
    let mut h: Vec<String> = ["scope", "category", "statistic"].map(String::from).to_vec();
    h.extend(WEEKDAY_NAMES.iter().map(|s| s.to_string()));
    h
}

fn write_histograms(out: &Path, name: &str, rows: &[(&str, &WeekdaySummary)]) -> anyhow::Result<()> {
    let mut w = csv_writer(out, name)?;
    w.write_record(summary_header())?;
    for (scope, h) in rows {
        let cat = h.category.to_string();
        let mut totals = vec![scope.to_string(), cat.clone(), "total".into()];
        totals.extend(h.totals.iter().map(u64::to_string));
        let mut occ = vec![scope.to_string(), cat.clone(), "occurrences".into()];
        occ.extend(h.occurrences.iter().map(u64::to_string));
        let mut means = vec![scope.to_string(), cat, "mean".into()];
        means.extend(h.means.iter().map(|&m| num(m)));
        w.write_record(&totals)?;
        w.write_record(&occ)?;
        w.write_record(&means)?;
    }
    w.flush()?;
    Ok(())
}

fn write_csv_bundle(
    out: &Path,
    report: &Report,
    ratios: &[RatioSeries],
    series: &DailyEventSeries,
) -> anyhow::Result<()> {
    let mut w = csv_writer(out, "moments.csv")?;
    w.write_record([
        "column", "n", "min", "max", "sum", "mean", "std_dev", "std_err", "skewness", "kurtosis",
        "zero_denominator_days",
    ])?;
    for c in &report.moments_table {
        let m = &c.moments;
        w.write_record([
            c.name.clone(),
            m.n.to_string(),
            num(m.min),
            num(m.max),
            num(m.sum),
            format!("{:.4}", m.mean),
            format!("{:.4}", m.std_dev),
            format!("{:.4}", m.std_err),
            m.skewness.map(|v| format!("{v:.4}")).unwrap_or_default(),
            m.kurtosis.map(|v| format!("{v:.4}")).unwrap_or_default(),
            c.zero_denominator_days.map(|d| d.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(out, "ratios.csv")?;
    let mut header = vec!["date".to_string()];
    header.extend(ratios.iter().map(|r| ratio_name(r.numerator, r.denominator)));
    w.write_record(&header)?;
    for t in 0..series.len() {
        let mut rec = vec![series.date_at(t).to_string()];
        rec.extend(ratios.iter().map(|r| num(r.values[t])));
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = csv_writer(out, "chi2.csv")?;
    w.write_record(["scope", "category", "statistic", "df", "p_value", "alpha", "rejects_uniform", "weighted", "low_expected_warning"])?;
    for r in &report.chi2 {
        w.write_record([
            r.scope.clone(),
            r.category.to_string(),
            format!("{:.4}", r.report.statistic),
            r.report.df.to_string(),
            format!("{:.4}", r.report.p_value),
            num(r.alpha),
            r.rejects_uniform.to_string(),
            r.report.weighted.to_string(),
            r.report.low_expected_warning.to_string(),
        ])?;
    }
    w.flush()?;

    let rows: Vec<(&str, &WeekdaySummary)> = report.weekday_histograms.iter().map(|h| ("full", h)).collect();
    write_histograms(out, "weekday_histograms.csv", &rows)?;
    if let Some(v) = &report.vacation {
        let rows: Vec<(&str, &WeekdaySummary)> = v.histograms.iter().map(|h| ("vacation", h)).collect();
        write_histograms(out, "vacation_histograms.csv", &rows)?;
    }

    let mut w = csv_writer(out, "periodogram.csv")?;
    w.write_record(["frequency", "power"])?;
    let p = &report.periodogram.spectrum;
    for (f, pw) in p.frequencies.iter().zip(&p.powers) {
        w.write_record([num(*f), num(*pw)])?;
    }
    w.flush()?;

    let granger: Vec<GrangerReport> = report.granger.iter().map(|g| g.report.clone()).collect();
    write_table_csv(&granger, crate::output::create(out, "granger.csv")?)?;

    for b in &report.beta_matrices {
        let cat = b.category.map(|c| c.to_string()).unwrap_or_else(|| "values".into());
        b.write_csv(crate::output::create(out, &format!("beta_{cat}.csv"))?)?;
    }

    let mut w = csv_writer(out, "weak_models.csv")?;
    w.write_record(["category", "day", "alpha0", "alpha1", "std_err_alpha1", "t_stat", "p_value", "df"])?;
    for m in &report.weak_models {
        w.write_record([
            report.periodogram.category.to_string(),
            WEEKDAY_NAMES[m.day].to_string(),
            format_4dp(m.alpha0),
            format_4dp(m.alpha1),
            format_4dp(m.std_err_alpha1),
            format_4dp(m.t_stat),
            format_4dp(m.p_value),
            m.df.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(out, "interval_variance.csv")?;
    w.write_record(["scope", "category", "from", "to", "population", "sample"])?;
    for v in &report.interval_variances {
        w.write_record([
            v.scope.clone(),
            v.category.to_string(),
            v.from.to_string(),
            v.to.to_string(),
            format!("{:.4}", v.population),
            format!("{:.4}", v.sample),
        ])?;
    }
    w.flush()?;

    let mut w = csv_writer(out, "decay_fits.csv")?;
    w.write_record(["scope", "category", "amplitude", "slope", "relaxation_time", "r_squared", "non_decaying", "note"])?;
    for d in &report.decay_fits {
        let f = d.fit.as_ref();
        w.write_record([
            d.scope.clone(),
            d.category.to_string(),
            opt(f.and_then(|f| f.param("amplitude"))),
            opt(f.and_then(|f| f.param("slope"))),
            opt(f.and_then(|f| f.param("relaxation_time"))),
            opt(f.and_then(|f| f.r_squared)),
            f.map(|f| f.non_decaying.to_string()).unwrap_or_default(),
            d.note.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
