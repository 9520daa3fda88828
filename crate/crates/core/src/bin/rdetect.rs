//! Command-line front end for the recession-detection pipeline.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error,
//! 4 empty result (e.g. no classifier clears the precision bound).

use clap::{Args, Parser, Subcommand, ValueEnum};
use recession_frontier::classifier::{Zeta, ZetaGrid};
use recession_frontier::error::{Error, Result};
use recession_frontier::frontier::{pareto_frontier, select_by_preference, ClassifierStats};
use recession_frontier::harness::{
    random_calendar, run_backtest, run_placebo, run_single_series, run_training, TrainSettings,
};
use recession_frontier::indicator::{materialize, Direction, GridConfig, IndicatorSpec};
use recession_frontier::ingest::{
    load_calendar, load_monthly_series, shift_forward_one_month, splice_scaled, Dataset,
};
use recession_frontier::month::MonthIndex;
use recession_frontier::probability::probability_timeline;
use recession_frontier::report::{
    load_ensemble, read_perfect_csv, save_ensemble, save_json, write_frontier_csv,
    write_indicator_trace, write_perfect_csv, write_stats_csv, write_timeline_csv,
};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "rdetect",
    version,
    about = "Recession detection from unemployment and vacancy data"
)]
struct Cli {
    /// Size of the worker thread pool. Defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble a dataset directory from raw CSV files.
    Ingest(IngestArgs),
    /// Materialize one indicator and write its monthly trace.
    Indicators(IndicatorsArgs),
    /// Sweep the classifier grid and write the perfect classifiers.
    Sweep(SweepArgs),
    /// Build the anticipation-precision frontier from a perfect-classifier table.
    Frontier(FrontierArgs),
    /// Evaluate a trained ensemble into a monthly probability timeline.
    Probability(ProbabilityArgs),
    /// Run the full training pipeline: sweep, frontier, ensemble, report.
    Train(TrainArgs),
    /// Train on one window, then score detections on a later test window.
    Backtest(BacktestArgs),
    /// Rerun training against a placebo event calendar.
    Placebo(PlaceboArgs),
    /// Run the single-series pipeline on one monthly series.
    SingleSeries(SingleSeriesArgs),
    /// Write plot-ready CSV files from stored artifacts.
    Export(ExportArgs),
}

#[derive(Args)]
struct GridArgs {
    /// JSON file overriding the indicator grid dimensions.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Smallest detection threshold.
    #[arg(long, default_value_t = 0.0001)]
    zeta_min: f64,
    /// Largest detection threshold.
    #[arg(long, default_value_t = 0.25)]
    zeta_max: f64,
    /// Threshold grid step.
    #[arg(long, default_value_t = 0.0001)]
    zeta_step: f64,
    /// Strict upper bound on ensemble-member sigma, in months.
    #[arg(long, default_value_t = 3.0)]
    sigma_max: f64,
    /// Tolerance for the return-to-zero exit rule.
    #[arg(long, default_value_t = 0.0)]
    zero_eps: f64,
    /// Also report error moments restricted to events from this month on.
    #[arg(long)]
    report_from: Option<MonthIndex>,
}

impl GridArgs {
    fn settings(&self, from: MonthIndex, to: MonthIndex) -> Result<TrainSettings> {
        let mut settings = TrainSettings::new(from, to);
        if let Some(path) = &self.grid {
            settings.grid = GridConfig::from_json(&fs::read_to_string(path)?)?;
        }
        let min = Zeta::from_value(self.zeta_min)?.ten_thousandths();
        let max = Zeta::from_value(self.zeta_max)?.ten_thousandths();
        let step = Zeta::from_value(self.zeta_step)?.ten_thousandths();
        settings.zetas = ZetaGrid::new(min, max, step)?;
        settings.sigma_max = self.sigma_max;
        settings.zero_eps = self.zero_eps;
        settings.report_from = self.report_from;
        Ok(settings)
    }
}

#[derive(Args)]
struct WindowArgs {
    /// First month of the training window, YYYY-MM.
    #[arg(long)]
    from: MonthIndex,
    /// Last month of the training window, YYYY-MM.
    #[arg(long)]
    to: MonthIndex,
}

#[derive(Args)]
struct IngestArgs {
    /// Unemployment rate CSV (date column plus a value column).
    #[arg(long)]
    unemployment: PathBuf,
    #[arg(long, default_value = "value")]
    unemployment_column: String,
    /// Vacancy rate CSV.
    #[arg(long)]
    vacancy: PathBuf,
    #[arg(long, default_value = "value")]
    vacancy_column: String,
    /// Older vacancy series to splice onto the main one.
    #[arg(long)]
    vacancy_early: Option<PathBuf>,
    #[arg(long, default_value = "value")]
    vacancy_early_column: String,
    /// Splice month: the early series is rescaled to match here.
    #[arg(long, requires = "vacancy_early")]
    vacancy_anchor: Option<MonthIndex>,
    /// Move vacancy observations forward one month.
    #[arg(long)]
    vacancy_shift: bool,
    /// Event calendar CSV with start,end columns.
    #[arg(long)]
    calendar: PathBuf,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IndicatorsArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Indicator spec, e.g. combo=minmax,smooth=ema:0.5,beta=5,gamma=1.0,delta=1.0
    #[arg(long)]
    spec: IndicatorSpec,
    /// Optional threshold column for plotting.
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output perfect-classifier CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FrontierArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Perfect-classifier CSV from a sweep.
    #[arg(long)]
    perfect: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    /// Output frontier CSV.
    #[arg(long)]
    out: PathBuf,
    /// Also write the full (mu, sigma) scatter here.
    #[arg(long)]
    all_out: Option<PathBuf>,
    /// Print the frontier point minimizing mu + lambda * sigma.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct ProbabilityArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Trained ensemble JSON.
    #[arg(long)]
    ensemble: PathBuf,
    /// First reported month; defaults to the ensemble's training start.
    #[arg(long)]
    from: Option<MonthIndex>,
    /// Last reported month.
    #[arg(long)]
    to: MonthIndex,
    #[arg(long, default_value_t = 0.0)]
    zero_eps: f64,
    /// Output timeline CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output directory for perfect.csv, frontier.csv, ensemble.json, report.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BacktestArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    /// Last month of the test window; testing starts right after the training window.
    #[arg(long)]
    test_end: MonthIndex,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlaceboArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    /// Placebo calendar CSV. Mutually exclusive with --seed.
    #[arg(long, conflicts_with = "seed")]
    calendar: Option<PathBuf>,
    /// Draw a random placebo calendar from this seed instead.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of events in a random placebo calendar.
    #[arg(long, default_value_t = 15)]
    events: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SingleSeriesArgs {
    /// Monthly series CSV.
    #[arg(long)]
    series: PathBuf,
    #[arg(long, default_value = "value")]
    column: String,
    /// Whether the series rises or falls when an event starts.
    #[arg(long)]
    direction: CliDirection,
    #[arg(long)]
    calendar: PathBuf,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliDirection {
    Rise,
    Fall,
}

impl From<CliDirection> for Direction {
    fn from(d: CliDirection) -> Direction {
        match d {
            CliDirection::Rise => Direction::RiseInRecession,
            CliDirection::Fall => Direction::FallInRecession,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    /// Full (mu, sigma) scatter of perfect classifiers.
    FrontierScatter,
    /// Ensemble probability timeline.
    Timeline,
    /// One indicator's monthly trace with an optional threshold line.
    IndicatorTrace,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    kind: ExportKind,
    #[arg(long)]
    dataset: PathBuf,
    /// Perfect-classifier CSV (frontier-scatter).
    #[arg(long)]
    perfect: Option<PathBuf>,
    /// Trained ensemble JSON (timeline).
    #[arg(long)]
    ensemble: Option<PathBuf>,
    /// Indicator spec (indicator-trace).
    #[arg(long)]
    spec: Option<IndicatorSpec>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    from: Option<MonthIndex>,
    #[arg(long)]
    to: Option<MonthIndex>,
    #[arg(long, default_value_t = 0.0)]
    zero_eps: f64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("rdetect: cannot size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rdetect: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(args) => ingest(args),
        Command::Indicators(args) => indicators(args),
        Command::Sweep(args) => sweep(args),
        Command::Frontier(args) => frontier(args),
        Command::Probability(args) => probability(args),
        Command::Train(args) => train(args),
        Command::Backtest(args) => backtest(args),
        Command::Placebo(args) => placebo(args),
        Command::SingleSeries(args) => single_series(args),
        Command::Export(args) => export(args),
    }
}

fn ingest(args: IngestArgs) -> Result<()> {
    let unemployment = load_monthly_series(&args.unemployment, &args.unemployment_column)?;
    let mut vacancy = load_monthly_series(&args.vacancy, &args.vacancy_column)?;
    if args.vacancy_shift {
        vacancy = shift_forward_one_month(&vacancy);
    }
    if let Some(early_path) = &args.vacancy_early {
        let anchor = args.vacancy_anchor.ok_or_else(|| {
            Error::Usage("--vacancy-anchor is required with --vacancy-early".into())
        })?;
        let early = load_monthly_series(early_path, &args.vacancy_early_column)?;
        vacancy = splice_scaled(&early, &vacancy, anchor)?;
    }
    let calendar = load_calendar(&args.calendar)?;
    let dataset = Dataset::new(unemployment, vacancy, calendar)?;
    fs::create_dir_all(&args.out)?;
    dataset.save(&args.out)?;
    let (from, to) = dataset.common_range();
    println!("dataset {}..{} written to {}", from, to, args.out.display());
    Ok(())
}

fn indicators(args: IndicatorsArgs) -> Result<()> {
    let dataset = Dataset::load(&args.dataset)?;
    let (from, to) = dataset.common_range();
    let u = dataset.unemployment.slice(from, to)?;
    let v = dataset.vacancy.slice(from, to)?;
    let indicator = materialize(&args.spec, &u, &v)?;
    let zeta = args.zeta.map(Zeta::from_value).transpose()?;
    write_indicator_trace(&args.out, &indicator, zeta)?;
    println!("indicator {} written to {}", args.spec, args.out.display());
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let dataset = Dataset::load(&args.dataset)?;
    let settings = args.grid.settings(args.window.from, args.window.to)?;
    let run = run_training(&dataset, &settings)?;
    write_perfect_csv(&args.out, &run.perfect)?;
    println!(
        "{} perfect classifiers out of {} cells written to {}",
        run.perfect.len(),
        run.report.classifier_count,
        args.out.display()
    );
    Ok(())
}

fn frontier(args: FrontierArgs) -> Result<()> {
    let dataset = Dataset::load(&args.dataset)?;
    let perfect = read_perfect_csv(&args.perfect)?;
    let events = dataset.calendar.starts_in(args.window.from, args.window.to);
    let stats = perfect
        .into_iter()
        .map(|p| ClassifierStats::from_detections(p.spec, p.detections, &events))
        .collect::<Result<Vec<_>>>()?;
    if let Some(path) = &args.all_out {
        write_stats_csv(path, &stats)?;
    }
    let frontier = pareto_frontier(stats);
    if frontier.is_empty() {
        return Err(Error::EmptyResult("no classifiers to build a frontier from".into()));
    }
    write_frontier_csv(&args.out, &frontier)?;
    println!("{} frontier points written to {}", frontier.len(), args.out.display());
    if let Some(lambda) = args.lambda {
        let pick = select_by_preference(&frontier, lambda)?;
        println!(
            "preferred (lambda={lambda}): mu={} sigma={} {} zeta={}",
            pick.mu, pick.sigma, pick.spec.indicator, pick.spec.zeta
        );
    }
    Ok(())
}

fn probability(args: ProbabilityArgs) -> Result<()> {
    let dataset = Dataset::load(&args.dataset)?;
    let ensemble = load_ensemble(&args.ensemble)?;
    let (from, to) = dataset.common_range();
    let u = dataset.unemployment.slice(from, to)?;
    let v = dataset.vacancy.slice(from, to)?;
    let start = args.from.unwrap_or(ensemble.train_start);
    let timeline = probability_timeline(&ensemble, &u, &v, start, args.to, args.zero_eps)?;
    write_timeline_csv(&args.out, &timeline)?;
    let last = timeline.ensemble.last().copied().unwrap_or(0.0);
    println!(
        "timeline {}..{} written to {} (last month: {:.1}%)",
        start,
        args.to,
        args.out.display(),
        100.0 * last
    );
    Ok(())
}

fn train(args: TrainArgs) -> Result<()> {
    let dataset = Dataset::load(&args.dataset)?;
    let settings = args.grid.settings(args.window.from, args.window.to)?;
    let run = run_training(&dataset, &settings)?;
    fs::create_dir_all(&args.out)?;
    write_perfect_csv(&args.out.join("perfect.csv"), &run.perfect)?;
    write_frontier_csv(&args.out.join("frontier.csv"), &run.frontier)?;
    save_json(&args.out.join("report.json"), &run.report)?;
    println!(
        "{} perfect, {} on the frontier, {} ensemble members",
        run.report.perfect_count, run.report.frontier_size, run.report.member_count
    );
    match &run.ensemble {
        Some(ensemble) => {
            save_ensemble(&args.out.join("ensemble.json"), ensemble)?;
            Ok(())
        }
        None => Err(Error::EmptyResult(format!(
            "no frontier classifier has sigma below {}",
            settings.sigma_max
        ))),
    }
}

fn backtest(args: BacktestArgs) -> Result<()> {
    let dataset = Dataset::load(&args.dataset)?;
    let settings = args.grid.settings(args.window.from, args.window.to)?;
    let run = run_backtest(&dataset, &settings, args.test_end)?;
    fs::create_dir_all(&args.out)?;
    write_frontier_csv(&args.out.join("frontier.csv"), &run.frontier)?;
    save_json(&args.out.join("report.json"), &run.report)?;
    if let Some(ensemble) = &run.ensemble {
        save_ensemble(&args.out.join("ensemble.json"), ensemble)?;
    }
    match &run.report.test {
        Some(test) => {
            let fmt = |x: Option<f64>| {
                x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.2}"))
            };
            println!(
                "test {}..{}: {} events, mean={} std={} min={} max={}",
                test.test_start,
                test.test_end,
                test.event_count,
                fmt(test.mean_error),
                fmt(test.std_error),
                fmt(test.min_error),
                fmt(test.max_error)
            );
        }
        None => println!("no test window"),
    }
    for note in &run.report.notes {
        println!("note: {note}");
    }
    if run.members.is_empty() {
        return Err(Error::EmptyResult(format!(
            "no frontier classifier has sigma below {}",
            settings.sigma_max
        )));
    }
    Ok(())
}

fn placebo(args: PlaceboArgs) -> Result<()> {
    let dataset = Dataset::load(&args.dataset)?;
    let settings = args.grid.settings(args.window.from, args.window.to)?;
    let calendar = match (&args.calendar, args.seed) {
        (Some(path), None) => load_calendar(path)?,
        (None, Some(seed)) => {
            random_calendar(seed, args.events, settings.train_start, settings.train_end)?
        }
        _ => {
            return Err(Error::Usage(
                "provide exactly one of --calendar or --seed".into(),
            ))
        }
    };
    let run = run_placebo(&dataset, &settings, &calendar)?;
    fs::create_dir_all(&args.out)?;
    save_json(&args.out.join("report.json"), &run.report)?;
    write_frontier_csv(&args.out.join("frontier.csv"), &run.frontier)?;
    if let Some(timeline) = &run.timeline {
        write_timeline_csv(&args.out.join("timeline.csv"), timeline)?;
    }
    match run.min_sigma {
        Some(s) => println!(
            "placebo frontier: {} points, smallest sigma {s:.1} months",
            run.frontier.len()
        ),
        None => println!("placebo frontier is empty"),
    }
    Ok(())
}

fn single_series(args: SingleSeriesArgs) -> Result<()> {
    let series = load_monthly_series(&args.series, &args.column)?;
    let calendar = load_calendar(&args.calendar)?;
    let settings = args.grid.settings(args.window.from, args.window.to)?;
    let run = run_single_series(&series, &calendar, args.direction.into(), &settings)?;
    fs::create_dir_all(&args.out)?;
    write_perfect_csv(&args.out.join("perfect.csv"), &run.perfect)?;
    write_frontier_csv(&args.out.join("frontier.csv"), &run.frontier)?;
    save_json(&args.out.join("report.json"), &run.report)?;
    println!(
        "{} perfect, {} on the frontier, smallest sigma {}",
        run.report.perfect_count,
        run.report.frontier_size,
        run.frontier
            .min_sigma()
            .map_or_else(|| "n/a".to_string(), |s| format!("{s:.1}"))
    );
    Ok(())
}

fn export(args: ExportArgs) -> Result<()> {
    let dataset = Dataset::load(&args.dataset)?;
    let (from, to) = dataset.common_range();
    match args.kind {
        ExportKind::FrontierScatter => {
            let perfect_path = args
                .perfect
                .ok_or_else(|| Error::Usage("--perfect is required for frontier-scatter".into()))?;
            let perfect = read_perfect_csv(&perfect_path)?;
            let window_from = args.from.unwrap_or(from);
            let window_to = args.to.unwrap_or(to);
            let events = dataset.calendar.starts_in(window_from, window_to);
            let stats = perfect
                .into_iter()
                .map(|p| ClassifierStats::from_detections(p.spec, p.detections, &events))
                .collect::<Result<Vec<_>>>()?;
            write_stats_csv(&args.out, &stats)?;
        }
        ExportKind::Timeline => {
            let ensemble_path = args
                .ensemble
                .ok_or_else(|| Error::Usage("--ensemble is required for timeline".into()))?;
            let ensemble = load_ensemble(&ensemble_path)?;
            let u = dataset.unemployment.slice(from, to)?;
            let v = dataset.vacancy.slice(from, to)?;
            let start = args.from.unwrap_or(ensemble.train_start);
            let end = args.to.unwrap_or(to);
            let timeline = probability_timeline(&ensemble, &u, &v, start, end, args.zero_eps)?;
            write_timeline_csv(&args.out, &timeline)?;
        }
        ExportKind::IndicatorTrace => {
            let spec = args
                .spec
                .ok_or_else(|| Error::Usage("--spec is required for indicator-trace".into()))?;
            let u = dataset.unemployment.slice(from, to)?;
            let v = dataset.vacancy.slice(from, to)?;
            let indicator = materialize(&spec, &u, &v)?;
            let zeta = args.zeta.map(Zeta::from_value).transpose()?;
            write_indicator_trace(&args.out, &indicator, zeta)?;
        }
    }
    println!("export written to {}", args.out.display());
    Ok(())
}
