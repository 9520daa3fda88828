//! End-to-end runs: training, train/test backtests, placebo calendars, and
//! single-series sweeps. Each run produces a serializable report next to the
//! typed artifacts.

use crate::classifier::{
    run_state_machine, sweep_perfect_grid, sweep_perfect_single, ClassifierSpec,
    PerfectClassifier, ZetaGrid,
};
use crate::error::{Error, Result};
use crate::frontier::{pareto_frontier, select_high_precision, stats, ClassifierStats, Frontier};
use crate::indicator::{materialize, Direction, GridConfig};
use crate::ingest::Dataset;
use crate::month::MonthIndex;
use crate::probability::{probability_timeline, Ensemble, EnsembleMember, ProbabilityTimeline};
use crate::report::single_leg_spec;
use crate::series::{MonthlySeries, RecessionCalendar};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Everything a training run needs besides the data itself.
#[derive(Debug, Clone)]
pub struct TrainSettings {
    pub train_start: MonthIndex,
    pub train_end: MonthIndex,
    pub grid: GridConfig,
    pub zetas: ZetaGrid,
    /// Strict upper bound on ensemble-member sigma, in months.
    pub sigma_max: f64,
    /// Tolerance for the return-to-zero exit rule. Zero for the built-in
    /// indicators, whose gap transform yields exact zeros.
    pub zero_eps: f64,
    /// When set, the report also carries error moments restricted to events
    /// from this month on.
    pub report_from: Option<MonthIndex>,
}

impl TrainSettings {
    pub fn new(train_start: MonthIndex, train_end: MonthIndex) -> Self {
        TrainSettings {
            train_start,
            train_end,
            grid: GridConfig::default(),
            zetas: ZetaGrid::DEFAULT,
            sigma_max: 3.0,
            zero_eps: 0.0,
            report_from: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.train_end < self.train_start {
            return Err(Error::Config(format!(
                "training window {}..{} is empty",
                self.train_start, self.train_end
            )));
        }
        if self.sigma_max.is_nan() || self.sigma_max <= 0.0 {
            return Err(Error::Config(format!(
                "sigma bound must be positive, got {}",
                self.sigma_max
            )));
        }
        if self.zero_eps.is_nan() || self.zero_eps < 0.0 {
            return Err(Error::Config(format!(
                "zero tolerance must be nonnegative, got {}",
                self.zero_eps
            )));
        }
        self.grid.validate()
    }
}

/// Typed output of a training run. `ensemble` is `None` exactly when no
/// frontier member clears the sigma bound.
#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub events: Vec<MonthIndex>,
    pub perfect: Vec<PerfectClassifier>,
    pub all_stats: Vec<ClassifierStats>,
    pub frontier: Frontier,
    pub members: Vec<ClassifierStats>,
    pub ensemble: Option<Ensemble>,
    pub report: RunReport,
}

/// One ensemble member as reported, with optional out-of-sample errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberRow {
    pub spec: ClassifierSpec,
    pub mu: f64,
    pub sigma: f64,
    pub detections: Vec<MonthIndex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_detections: Option<Vec<MonthIndex>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_errors: Option<Vec<i32>>,
}

/// Error moments over a sub-window of the training sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubwindowStats {
    pub from: MonthIndex,
    pub event_count: usize,
    pub mean_mu: f64,
    pub mean_sigma: f64,
}

/// Aggregated out-of-sample results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestReport {
    pub test_start: MonthIndex,
    pub test_end: MonthIndex,
    pub event_count: usize,
    pub false_positives: usize,
    pub missed_events: usize,
    /// Member-level moments averaged across the ensemble. Absent whenever any
    /// member's test detections fail to pair one-to-one with the test events.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
}

/// Serializable summary of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: String,
    pub train_start: MonthIndex,
    pub train_end: MonthIndex,
    pub indicator_count: u64,
    pub classifier_count: u64,
    pub event_count: usize,
    pub perfect_count: usize,
    pub frontier_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_frontier_sigma: Option<f64>,
    pub member_count: usize,
    pub members: Vec<MemberRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subwindow: Option<SubwindowStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test: Option<TestReport>,
    pub notes: Vec<String>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let values: Vec<f64> = values.collect();
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Trains on the window in `settings`: sweeps the grid, keeps the perfect
/// classifiers, extracts the frontier, and selects the high-precision
/// ensemble. Fails if a selected member has zero error spread, since the
/// probability model needs sigma > 0.
pub fn run_training(dataset: &Dataset, settings: &TrainSettings) -> Result<TrainingRun> {
    settings.validate()?;
    let (u, v) = aligned_series(dataset, settings)?;
    let events = dataset
        .calendar
        .starts_in(settings.train_start, settings.train_end);
    if events.is_empty() {
        return Err(Error::Config(format!(
            "no event starts inside {}..{}",
            settings.train_start, settings.train_end
        )));
    }
    let perfect = sweep_perfect_grid(
        &u,
        &v,
        &settings.grid,
        &settings.zetas,
        (settings.train_start, settings.train_end),
        events.len() as u32,
        settings.zero_eps,
    )?;
    let all_stats = stats_for(&perfect, &events)?;
    finish_training(settings, events, perfect, all_stats, "train")
}

fn finish_training(
    settings: &TrainSettings,
    events: Vec<MonthIndex>,
    perfect: Vec<PerfectClassifier>,
    all_stats: Vec<ClassifierStats>,
    mode: &str,
) -> Result<TrainingRun> {
    let frontier = pareto_frontier(all_stats.clone());
    let members = select_high_precision(&frontier, settings.sigma_max);
    let mut notes = Vec::new();

    let ensemble = if members.is_empty() {
        notes.push(format!(
            "empty frontier segment: no perfect classifier has sigma below {}",
            settings.sigma_max
        ));
        None
    } else {
        let ensemble = Ensemble {
            train_start: settings.train_start,
            train_end: settings.train_end,
            members: members
                .iter()
                .map(|s| EnsembleMember {
                    spec: s.spec.indicator,
                    zeta: s.spec.zeta,
                    mu: s.mu,
                    sigma: s.sigma,
                    detections: s.detections.clone(),
                })
                .collect(),
        };
        ensemble.validate()?;
        Some(ensemble)
    };

    let subwindow = settings
        .report_from
        .and_then(|from| subwindow_stats(&members, &events, from));

    let report = RunReport {
        mode: mode.into(),
        train_start: settings.train_start,
        train_end: settings.train_end,
        indicator_count: settings.grid.indicator_count(),
        classifier_count: settings
            .grid
            .classifier_cell_count(settings.zetas.len() as u64),
        event_count: events.len(),
        perfect_count: perfect.len(),
        frontier_size: frontier.len(),
        min_frontier_sigma: frontier.min_sigma(),
        member_count: members.len(),
        members: members
            .iter()
            .map(|s| MemberRow {
                spec: s.spec,
                mu: s.mu,
                sigma: s.sigma,
                detections: s.detections.clone(),
                test_detections: None,
                test_errors: None,
            })
            .collect(),
        mean_mu: mean(members.iter().map(|s| s.mu)),
        mean_sigma: mean(members.iter().map(|s| s.sigma)),
        subwindow,
        test: None,
        notes,
    };

    Ok(TrainingRun {
        events,
        perfect,
        all_stats,
        frontier,
        members,
        ensemble,
        report,
    })
}

fn aligned_series(
    dataset: &Dataset,
    settings: &TrainSettings,
) -> Result<(MonthlySeries, MonthlySeries)> {
    let (from, to) = dataset.common_range();
    if settings.train_start < from || settings.train_end > to {
        return Err(Error::Alignment(format!(
            "training window {}..{} outside the data range {from}..{to}",
            settings.train_start, settings.train_end
        )));
    }
    // trailing transforms use the full history before the window too
    Ok((
        dataset.unemployment.slice(from, to)?,
        dataset.vacancy.slice(from, to)?,
    ))
}

fn stats_for(
    perfect: &[PerfectClassifier],
    events: &[MonthIndex],
) -> Result<Vec<ClassifierStats>> {
    perfect
        .par_iter()
        .map(|p| ClassifierStats::from_detections(p.spec, p.detections.clone(), events))
        .collect()
}

fn subwindow_stats(
    members: &[ClassifierStats],
    events: &[MonthIndex],
    from: MonthIndex,
) -> Option<SubwindowStats> {
    let kept: Vec<usize> = events
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= from)
        .map(|(j, _)| j)
        .collect();
    if kept.is_empty() || members.is_empty() {
        return None;
    }
    let mut mus = Vec::with_capacity(members.len());
    let mut sigmas = Vec::with_capacity(members.len());
    for m in members {
        let errors: Vec<i32> = kept.iter().map(|&j| m.errors[j]).collect();
        let (mu, sigma) = stats(&errors).ok()?;
        mus.push(mu);
        sigmas.push(sigma);
    }
    Some(SubwindowStats {
        from,
        event_count: kept.len(),
        mean_mu: mean(mus.into_iter()).unwrap(),
        mean_sigma: mean(sigmas.into_iter()).unwrap(),
    })
}

/// Trains on `[train_start, train_end]`, then continues each member's state
/// machine through `test_end` and pairs out-of-sample detections with
/// out-of-sample event starts. Any member whose test detections do not match
/// the test events one-to-one voids the aggregate test statistics.
pub fn run_backtest(
    dataset: &Dataset,
    settings: &TrainSettings,
    test_end: MonthIndex,
) -> Result<TrainingRun> {
    let mut run = run_training(dataset, settings)?;
    run.report.mode = "backtest".into();
    let test_start = settings.train_end + 1;
    if test_end < test_start {
        run.report
            .notes
            .push(format!("empty test window: {test_end} precedes {test_start}"));
        return Ok(run);
    }
    let (_, data_end) = dataset.common_range();
    if test_end > data_end {
        return Err(Error::Alignment(format!(
            "test end {test_end} beyond the data range end {data_end}"
        )));
    }
    let (u, v) = aligned_series(dataset, settings)?;
    let test_events = dataset.calendar.starts_in(test_start, test_end);

    let mut false_positives = 0;
    let mut missed = 0;
    let mut per_member: Vec<(Vec<MonthIndex>, Option<Vec<i32>>)> = Vec::new();
    for member in &run.members {
        let indicator = materialize(&member.spec.indicator, &u, &v)?;
        let mut outcome = run_state_machine(
            &indicator.series,
            member.spec.zeta,
            (settings.train_start, settings.train_end),
            settings.zero_eps,
        )?;
        outcome.resume(
            &indicator.series.slice(test_start, test_end)?,
            member.spec.zeta,
            settings.zero_eps,
        )?;
        let test_detections: Vec<MonthIndex> = outcome
            .detections()
            .iter()
            .copied()
            .filter(|&d| d >= test_start)
            .collect();
        let errors = if test_detections.len() == test_events.len() {
            Some(
                test_detections
                    .iter()
                    .zip(&test_events)
                    .map(|(&d, &s)| d - s)
                    .collect::<Vec<i32>>(),
            )
        } else {
            if test_detections.len() > test_events.len() {
                false_positives += test_detections.len() - test_events.len();
            } else {
                missed += test_events.len() - test_detections.len();
            }
            None
        };
        per_member.push((test_detections, errors));
    }

    let clean = per_member.iter().all(|(_, e)| e.is_some()) && !per_member.is_empty();
    let aggregate = |f: &dyn Fn(&[i32]) -> f64| -> Option<f64> {
        if !clean || test_events.is_empty() {
            return None;
        }
        mean(per_member.iter().map(|(_, e)| f(e.as_ref().unwrap())))
    };
    let test = TestReport {
        test_start,
        test_end,
        event_count: test_events.len(),
        false_positives,
        missed_events: missed,
        mean_error: aggregate(&|e| stats(e).map(|(m, _)| m).unwrap_or(f64::NAN)),
        std_error: aggregate(&|e| stats(e).map(|(_, s)| s).unwrap_or(f64::NAN)),
        min_error: aggregate(&|e| e.iter().copied().min().unwrap() as f64),
        max_error: aggregate(&|e| e.iter().copied().max().unwrap() as f64),
    };
    if !clean {
        run.report.notes.push(format!(
            "test statistics not computable: {false_positives} extra and {missed} missing \
             detections across members"
        ));
    }
    for (row, (detections, errors)) in run.report.members.iter_mut().zip(per_member) {
        row.test_detections = Some(detections);
        row.test_errors = errors;
    }
    run.report.test = Some(test);
    Ok(run)
}

/// A placebo run's typed output: the frontier against a replacement calendar
/// plus, when possible, the probability timeline of the frontier classifiers.
#[derive(Debug, Clone)]
pub struct PlaceboRun {
    pub events: Vec<MonthIndex>,
    pub perfect_count: usize,
    pub frontier: Frontier,
    pub min_sigma: Option<f64>,
    pub timeline: Option<ProbabilityTimeline>,
    pub report: RunReport,
}

/// Reruns the whole pipeline with `placebo` in place of the real calendar.
/// The frontier is built from all classifiers that are perfect against the
/// placebo events; the timeline averages those frontier classifiers.
pub fn run_placebo(
    dataset: &Dataset,
    settings: &TrainSettings,
    placebo: &RecessionCalendar,
) -> Result<PlaceboRun> {
    let swapped = Dataset {
        unemployment: dataset.unemployment.clone(),
        vacancy: dataset.vacancy.clone(),
        calendar: placebo.clone(),
    };
    settings.validate()?;
    let (u, v) = aligned_series(&swapped, settings)?;
    let events = placebo.starts_in(settings.train_start, settings.train_end);
    if events.is_empty() {
        return Err(Error::Config(format!(
            "no placebo event starts inside {}..{}",
            settings.train_start, settings.train_end
        )));
    }
    let perfect = sweep_perfect_grid(
        &u,
        &v,
        &settings.grid,
        &settings.zetas,
        (settings.train_start, settings.train_end),
        events.len() as u32,
        settings.zero_eps,
    )?;
    let all_stats = stats_for(&perfect, &events)?;
    let frontier = pareto_frontier(all_stats);
    let min_sigma = frontier.min_sigma();

    let mut notes = Vec::new();
    let timeline = if frontier.is_empty() {
        notes.push("no classifier is perfect against the placebo calendar".into());
        None
    } else if frontier.points().iter().any(|p| p.sigma <= 0.0) {
        notes.push("frontier contains zero-spread members, timeline skipped".into());
        None
    } else {
        let ensemble = Ensemble {
            train_start: settings.train_start,
            train_end: settings.train_end,
            members: frontier
                .points()
                .iter()
                .map(|s| EnsembleMember {
                    spec: s.spec.indicator,
                    zeta: s.spec.zeta,
                    mu: s.mu,
                    sigma: s.sigma,
                    detections: s.detections.clone(),
                })
                .collect(),
        };
        Some(probability_timeline(
            &ensemble,
            &u,
            &v,
            settings.train_start,
            settings.train_end,
            settings.zero_eps,
        )?)
    };

    let report = RunReport {
        mode: "placebo".into(),
        train_start: settings.train_start,
        train_end: settings.train_end,
        indicator_count: settings.grid.indicator_count(),
        classifier_count: settings
            .grid
            .classifier_cell_count(settings.zetas.len() as u64),
        event_count: events.len(),
        perfect_count: perfect.len(),
        frontier_size: frontier.len(),
        min_frontier_sigma: min_sigma,
        member_count: 0,
        members: Vec::new(),
        mean_mu: None,
        mean_sigma: None,
        subwindow: None,
        test: None,
        notes,
    };

    Ok(PlaceboRun {
        events,
        perfect_count: perfect.len(),
        frontier,
        min_sigma,
        timeline,
        report,
    })
}

/// Draws `events` distinct months uniformly from `[from, to]`, sorted. The
/// generator is seeded, so a run is reproducible from its seed.
pub fn random_calendar(
    seed: u64,
    events: usize,
    from: MonthIndex,
    to: MonthIndex,
) -> Result<RecessionCalendar> {
    let span = (to - from + 1) as usize;
    if events == 0 || events > span {
        return Err(Error::Config(format!(
            "cannot place {events} distinct starts in {span} months"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offsets: Vec<usize> = sample(&mut rng, span, events).into_vec();
    offsets.sort_unstable();
    RecessionCalendar::from_starts(offsets.into_iter().map(|o| from + o as i32).collect())
}

/// Runs the per-leg pipeline on one series: same smoothing, extremum, gap,
/// and threshold stages, with no combination step. `direction` says whether
/// the series rises or falls when an event starts.
pub fn run_single_series(
    series: &MonthlySeries,
    calendar: &RecessionCalendar,
    direction: Direction,
    settings: &TrainSettings,
) -> Result<TrainingRun> {
    settings.validate()?;
    if settings.train_start < series.start() || settings.train_end > series.end() {
        return Err(Error::Alignment(format!(
            "training window {}..{} outside the data range {}..{}",
            settings.train_start,
            settings.train_end,
            series.start(),
            series.end()
        )));
    }
    let events = calendar.starts_in(settings.train_start, settings.train_end);
    if events.is_empty() {
        return Err(Error::Config(format!(
            "no event starts inside {}..{}",
            settings.train_start, settings.train_end
        )));
    }
    let singles = sweep_perfect_single(
        series,
        direction,
        &settings.grid,
        &settings.zetas,
        (settings.train_start, settings.train_end),
        events.len() as u32,
        settings.zero_eps,
    )?;
    // a single-leg classifier is a weight-1 (rise) or weight-0 (fall) linear
    // combination, so the combined-spec machinery applies unchanged
    let rise = direction == Direction::RiseInRecession;
    let perfect: Vec<PerfectClassifier> = singles
        .into_iter()
        .map(|s| PerfectClassifier {
            spec: ClassifierSpec {
                indicator: single_leg_spec(s.leg, rise),
                zeta: s.zeta,
            },
            detections: s.detections,
        })
        .collect();
    let all_stats = stats_for(&perfect, &events)?;
    let mut run = finish_training(settings, events, perfect, all_stats, "single")?;
    run.report.indicator_count = settings.grid.per_leg_count();
    run.report.classifier_count = settings.grid.per_leg_count() * settings.zetas.len() as u64;
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_calendar;

    fn m(y: i32, mo: u32) -> MonthIndex {
        MonthIndex::new(y, mo)
    }

    /// Small deterministic dataset: unemployment rises in three episodes of
    /// different steepness and is flat or falling otherwise, vacancies mirror
    /// it. Calendar offsets are anti-monotone in episode steepness, so no
    /// classifier can have identical errors on all three events.
    fn toy_dataset() -> Dataset {
        let start = m(2000, 1);
        let episodes = [(24usize, 8usize, 0.25), (60, 4, 1.0), (96, 6, 0.5)];
        let n = 120;
        let mut u = Vec::with_capacity(n);
        let mut level: f64 = 5.0;
        for t in 0..n {
            match episodes.iter().find(|&&(a, len, _)| t >= a && t < a + len) {
                Some(&(_, _, slope)) => level += slope,
                None => level = (level - 0.25).max(5.0),
            }
            u.push(level);
        }
        let v: Vec<f64> = u.iter().map(|x| 12.0 - x).collect();
        let calendar = parse_calendar("start,end\n2002-01,\n2005-03,\n2008-02,\n").unwrap();
        Dataset {
            unemployment: MonthlySeries::new(start, u).unwrap(),
            vacancy: MonthlySeries::new(start, v).unwrap(),
            calendar,
        }
    }

    fn small_settings(dataset: &Dataset) -> TrainSettings {
        let (from, to) = dataset.common_range();
        let mut s = TrainSettings::new(from, to);
        s.grid = GridConfig {
            simple_alphas: vec![0, 1],
            ema_alpha_tenths: vec![],
            betas: vec![6, 12],
            gamma_tenths: vec![10],
            delta_tenths: vec![0, 5, 10],
            combos: vec![crate::indicator::Combo::Linear, crate::indicator::Combo::MinMax],
        };
        s.zetas = ZetaGrid::new(100, 20_000, 100).unwrap();
        s
    }

    #[test]
    fn training_produces_members_on_clean_episodes() {
        let dataset = toy_dataset();
        let settings = small_settings(&dataset);
        let run = run_training(&dataset, &settings).unwrap();
        assert_eq!(run.events.len(), 3);
        assert!(run.report.perfect_count > 0);
        assert!(!run.frontier.is_empty());
        // frontier members are mutually non-dominated
        let pts = run.frontier.points();
        for a in pts {
            for b in pts {
                let dominates = a.mu <= b.mu
                    && a.sigma <= b.sigma
                    && (a.mu < b.mu || a.sigma < b.sigma);
                assert!(!dominates || std::ptr::eq(a, b));
            }
        }
        for s in &run.members {
            assert!(s.sigma < settings.sigma_max);
        }
        if let Some(e) = &run.ensemble {
            assert_eq!(e.members.len(), run.members.len());
        }
    }

    #[test]
    fn training_is_deterministic_across_thread_counts() {
        let dataset = toy_dataset();
        let settings = small_settings(&dataset);
        let a = run_training(&dataset, &settings).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_training(&dataset, &settings).unwrap());
        assert_eq!(a.perfect, b.perfect);
        assert_eq!(a.frontier, b.frontier);
    }

    #[test]
    fn backtest_splits_train_and_test() {
        let dataset = toy_dataset();
        let (from, to) = dataset.common_range();
        let mut settings = small_settings(&dataset);
        // train through the second episode, test on the third
        settings.train_start = from;
        settings.train_end = m(2006, 12);
        let run = run_backtest(&dataset, &settings, to).unwrap();
        let test = run.report.test.as_ref().unwrap();
        assert_eq!(test.event_count, 1);
        assert_eq!(run.events.len(), 2);
        for row in &run.report.members {
            let d = row.test_detections.as_ref().unwrap();
            assert!(d.iter().all(|&x| x > settings.train_end));
        }
        if test.false_positives == 0 && test.missed_events == 0 {
            assert!(test.mean_error.is_some());
        } else {
            assert!(test.mean_error.is_none());
            assert!(!run.report.notes.is_empty());
        }
    }

    #[test]
    fn backtest_with_empty_test_window_is_training_plus_note() {
        let dataset = toy_dataset();
        let settings = small_settings(&dataset);
        let run = run_backtest(&dataset, &settings, settings.train_end).unwrap();
        assert!(run.report.test.is_none());
        assert!(run.report.notes.iter().any(|n| n.contains("empty test window")));
    }

    #[test]
    fn placebo_run_reports_frontier_against_replacement_calendar() {
        let dataset = toy_dataset();
        let settings = small_settings(&dataset);
        let placebo = random_calendar(7, 3, settings.train_start, settings.train_end).unwrap();
        let run = run_placebo(&dataset, &settings, &placebo).unwrap();
        assert_eq!(run.events.len(), 3);
        assert_eq!(run.report.mode, "placebo");
        assert_eq!(run.report.frontier_size, run.frontier.len());
        if let Some(t) = &run.timeline {
            assert_eq!(t.start, settings.train_start);
        }
    }

    #[test]
    fn random_calendar_is_seeded_sorted_and_distinct() {
        let from = m(1930, 1);
        let to = m(2021, 12);
        let a = random_calendar(42, 15, from, to).unwrap();
        let b = random_calendar(42, 15, from, to).unwrap();
        assert_eq!(a.starts(), b.starts());
        let c = random_calendar(43, 15, from, to).unwrap();
        assert_ne!(a.starts(), c.starts());
        assert_eq!(a.len(), 15);
        assert!(a.starts().windows(2).all(|w| w[0] < w[1]));
        assert!(a.starts().iter().all(|&s| s >= from && s <= to));
        assert!(random_calendar(1, 0, from, to).is_err());
        assert!(random_calendar(1, 5, from, from + 2).is_err());
    }

    #[test]
    fn single_series_run_uses_leg_pipeline_only() {
        let dataset = toy_dataset();
        let settings = small_settings(&dataset);
        let run = run_single_series(
            &dataset.unemployment,
            &dataset.calendar,
            Direction::RiseInRecession,
            &settings,
        )
        .unwrap();
        assert_eq!(run.report.mode, "single");
        assert_eq!(run.report.indicator_count, settings.grid.per_leg_count());
        for p in &run.perfect {
            assert_eq!(p.spec.indicator.delta_tenths, 10);
        }
        assert!(run.report.perfect_count > 0);
    }

    #[test]
    fn training_ignores_data_after_the_window() {
        let dataset = toy_dataset();
        let (from, _) = dataset.common_range();
        let mut settings = small_settings(&dataset);
        settings.train_start = from;
        settings.train_end = m(2006, 12);
        let a = run_training(&dataset, &settings).unwrap();
        // perturb every post-window month
        let cut = dataset.unemployment.index_of(settings.train_end).unwrap();
        let mut perturbed = dataset.clone();
        let mut u = perturbed.unemployment.values().to_vec();
        let mut v = perturbed.vacancy.values().to_vec();
        for t in cut + 1..u.len() {
            u[t] += 3.5;
            v[t] = (v[t] - 2.0).max(0.1);
        }
        perturbed.unemployment = MonthlySeries::new(perturbed.unemployment.start(), u).unwrap();
        perturbed.vacancy = MonthlySeries::new(perturbed.vacancy.start(), v).unwrap();
        let b = run_training(&perturbed, &settings).unwrap();
        assert_eq!(a.perfect, b.perfect);
        assert_eq!(a.frontier, b.frontier);
    }
}
