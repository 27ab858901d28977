//! `dow`: batch reports on day-of-week effects in daily event counts.

mod deskreject;
mod manifest;
mod output;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};
use dow_core::synth::{generate, SynthConfig};
use dow_core::{ErrorClass, EventCategory};

#[derive(Parser)]
#[command(name = "dow", version, about = "Day-of-week effect reports for daily event counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis bundle for a canonical daily CSV.
    Report(ReportArgs),
    /// Desk-rejection decision-day histograms and decay fits.
    Deskreject(DeskrejectArgs),
    /// Generate a synthetic series from a TOML or JSON config.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(clap::Args)]
pub struct ReportArgs {
    /// CSV with header date,submitted,accepted,rejected,desk_rejected,withdrawn.
    #[arg(long)]
    pub input: PathBuf,
    /// Inclusive analysis window, YYYY-MM-DD:YYYY-MM-DD.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(NaiveDate, NaiveDate)>,
    /// Category for the periodogram, distribution fits and weak models.
    #[arg(long, default_value = "submitted", value_parser = parse_category)]
    pub category: EventCategory,
    #[arg(long, default_value_t = 7)]
    pub lags: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Expected χ² counts proportional to weekday occurrences.
    #[arg(long)]
    pub chi2_weighted: bool,
    /// Recorded in the manifest; the report itself draws no random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(clap::Args)]
pub struct DeskrejectArgs {
    /// CSV with header date,editor_group,desk_rejections.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(NaiveDate, NaiveDate)>,
    #[arg(long, default_value = "deskreject")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(clap::Args)]
struct SynthArgs {
    /// TOML or JSON config (chosen by extension, TOML otherwise).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn parse_window(s: &str) -> Result<(NaiveDate, NaiveDate), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("window '{s}' is not FROM:TO"))?;
    let parse = |d: &str| {
        NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|e| format!("bad date '{d}': {e}"))
    };
    let (from, to) = (parse(a)?, parse(b)?);
    if from > to {
        return Err(format!("window start {from} is after end {to}"));
    }
    Ok((from, to))
}

fn parse_category(s: &str) -> Result<EventCategory, String> {
    s.parse().map_err(|e: dow_core::Error| e.to_string())
}

/// Validation-class failures raised by the CLI itself.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InvalidInput(pub String);

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<dow_core::Error>() {
            return match e.class() {
                ErrorClass::Validation => 2,
                ErrorClass::Numeric => 3,
                ErrorClass::Io => 4,
            };
        }
        if cause.is::<InvalidInput>() || cause.is::<toml::de::Error>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if cause.is::<std::io::Error>() {
            return 4;
        }
    }
    2
}

fn read_config(path: &Path) -> anyhow::Result<SynthConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    };
    Ok(config)
}

fn run_synth(args: &SynthArgs) -> anyhow::Result<()> {
    let mut config = read_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let series = generate(&config)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = std::fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    series.write_csv(std::io::BufWriter::new(file))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Report(args) => report::run(args),
        Command::Deskreject(args) => deskreject::run(args),
        Command::Synth(args) => run_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
