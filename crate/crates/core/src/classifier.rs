//! The recession state machine and the threshold sweep kernel.
//!
//! A classifier is an indicator plus a threshold. Starting in expansion, it
//! enters recession when the indicator reaches the threshold and returns to
//! expansion only when the indicator falls back to zero. Each expansion to
//! recession transition is one detection.
//!
//! Sweeping all thresholds naively costs one pass per threshold. Instead the
//! indicator is decomposed once into excursions (maximal intervals of
//! positive values). Within an excursion the detection month for a threshold
//! is the first month whose running maximum reaches it, so the whole
//! threshold grid is answered from the excursions' running-max records.

use crate::error::{Error, Result};
use crate::indicator::{
    combine, materialize_leg, Direction, GridConfig, IndicatorSpec, LegSpec,
};
use crate::month::MonthIndex;
use crate::series::MonthlySeries;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Detection threshold stored as integer ten-thousandths so a 2,500-step
/// grid never drifts through float accumulation.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Zeta(u32);

impl Zeta {
    pub fn from_ten_thousandths(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Grid("threshold must be positive".into()));
        }
        Ok(Zeta(k))
    }

    pub fn from_value(v: f64) -> Result<Self> {
        let k = (v * 10_000.0).round();
        if k < 1.0 || (k / 10_000.0 - v).abs() > 1e-9 {
            return Err(Error::Grid(format!(
                "threshold {v} is not a positive multiple of 0.0001"
            )));
        }
        Ok(Zeta(k as u32))
    }

    pub fn ten_thousandths(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 10_000.0
    }
}

impl fmt::Display for Zeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Ascending arithmetic threshold grid in ten-thousandths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaGrid {
    pub min: u32,
    pub max: u32,
    pub step: u32,
}

impl ZetaGrid {
    /// The full threshold grid: 0.0001 to 0.25 in steps of 0.0001.
    pub const DEFAULT: ZetaGrid = ZetaGrid {
        min: 1,
        max: 2_500,
        step: 1,
    };

    pub fn new(min: u32, max: u32, step: u32) -> Result<Self> {
        if min == 0 || step == 0 || max < min {
            return Err(Error::Grid(format!(
                "invalid threshold grid min={min} max={max} step={step} (ten-thousandths)"
            )));
        }
        Ok(ZetaGrid { min, max, step })
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn zeta(&self, index: usize) -> Zeta {
        debug_assert!(index < self.len());
        Zeta(self.min + index as u32 * self.step)
    }

    pub fn iter(&self) -> impl Iterator<Item = Zeta> + '_ {
        (0..self.len()).map(|i| self.zeta(i))
    }

    /// Index of the largest grid threshold not exceeding `peak`, if any.
    fn last_index_at_or_below(&self, peak: f64) -> Option<usize> {
        if peak < self.min as f64 / 10_000.0 {
            return None;
        }
        // quantize exactly: largest integer k with k/10000 <= peak
        let mut k = (peak * 10_000.0).floor() as i64;
        while k as f64 / 10_000.0 > peak {
            k -= 1;
        }
        while (k + 1) as f64 / 10_000.0 <= peak {
            k += 1;
        }
        if k < self.min as i64 {
            return None;
        }
        let k = (k as u64).min(self.max as u64) as u32;
        Some(((k - self.min) / self.step) as usize)
    }
}

/// Recession-state path and detection dates for one classifier run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionOutcome {
    start: MonthIndex,
    in_recession: Vec<bool>,
    detections: Vec<MonthIndex>,
}

impl DetectionOutcome {
    pub fn start(&self) -> MonthIndex {
        self.start
    }

    pub fn end(&self) -> MonthIndex {
        self.start + (self.in_recession.len() as i32 - 1)
    }

    pub fn detections(&self) -> &[MonthIndex] {
        &self.detections
    }

    /// Per-month recession flag over the run window.
    pub fn state_path(&self) -> &[bool] {
        &self.in_recession
    }

    pub fn in_recession_at(&self, month: MonthIndex) -> Option<bool> {
        let i = month - self.start;
        (0..self.in_recession.len() as i32)
            .contains(&i)
            .then(|| self.in_recession[i as usize])
    }

    /// Most recent detection at or before `month`.
    pub fn last_detection_at(&self, month: MonthIndex) -> Option<MonthIndex> {
        match self.detections.partition_point(|&d| d <= month) {
            0 => None,
            n => Some(self.detections[n - 1]),
        }
    }

    /// Continues the state machine over new months contiguous with the run
    /// so far. Identical to a single pass over the concatenated range.
    pub fn resume(&mut self, extension: &MonthlySeries, zeta: Zeta, zero_eps: f64) -> Result<()> {
        if extension.start() != self.end() + 1 {
            return Err(Error::Alignment(format!(
                "extension starts at {}, expected {}",
                extension.start(),
                self.end() + 1
            )));
        }
        let mut state = *self.in_recession.last().expect("outcome is never empty");
        for (month, value) in extension.iter() {
            if state {
                if value <= zero_eps {
                    state = false;
                }
            } else if value >= zeta.value() {
                state = true;
                self.detections.push(month);
            }
            self.in_recession.push(state);
        }
        Ok(())
    }
}

/// Runs the recession state machine over `[window.0, window.1]`, starting in
/// expansion. This is the reference path; the sweep kernel must agree with
/// it for every threshold.
pub fn run_state_machine(
    indicator: &MonthlySeries,
    zeta: Zeta,
    window: (MonthIndex, MonthIndex),
    zero_eps: f64,
) -> Result<DetectionOutcome> {
    let slice = indicator.slice(window.0, window.1)?;
    let mut outcome = DetectionOutcome {
        start: window.0,
        in_recession: Vec::with_capacity(slice.len()),
        detections: Vec::new(),
    };
    let mut state = false;
    for (month, value) in slice.iter() {
        if state {
            if value <= zero_eps {
                state = false;
            }
        } else if value >= zeta.value() {
            state = true;
            outcome.detections.push(month);
        }
        outcome.in_recession.push(state);
    }
    Ok(outcome)
}

/// A maximal interval of positive indicator values, carrying its running-max
/// record points: offsets (relative to the window start) where the running
/// maximum strictly increases.
#[derive(Debug, Clone, PartialEq)]
pub struct Excursion {
    pub first_offset: usize,
    pub last_offset: usize,
    /// `(offset, running max)` at each new record, records strictly
    /// increasing in value.
    pub records: Vec<(usize, f64)>,
}

impl Excursion {
    pub fn peak(&self) -> f64 {
        self.records.last().map(|&(_, v)| v).unwrap_or(0.0)
    }

    /// Offset of the detection month for `zeta`, if the excursion reaches it.
    pub fn detection_offset(&self, zeta: Zeta) -> Option<usize> {
        let z = zeta.value();
        let i = self.records.partition_point(|&(_, v)| v < z);
        self.records.get(i).map(|&(offset, _)| offset)
    }
}

/// Splits window values into excursions. Values at or below `zero_eps` are
/// treated as zero.
pub fn excursion_decompose(values: &[f64], zero_eps: f64) -> Vec<Excursion> {
    let mut excursions = Vec::new();
    let mut current: Option<Excursion> = None;
    for (offset, &value) in values.iter().enumerate() {
        if value > zero_eps {
            let exc = current.get_or_insert_with(|| Excursion {
                first_offset: offset,
                last_offset: offset,
                records: Vec::new(),
            });
            exc.last_offset = offset;
            if value > exc.peak() {
                exc.records.push((offset, value));
            }
        } else if let Some(exc) = current.take() {
            excursions.push(exc);
        }
    }
    excursions.extend(current);
    excursions
}

/// Per-threshold detection summary for one indicator over one window:
/// detection counts for the whole grid, with detection dates recoverable on
/// demand for thresholds of interest.
#[derive(Debug, Clone)]
pub struct SweepSummary {
    window_start: MonthIndex,
    grid: ZetaGrid,
    counts: Vec<u32>,
    excursions: Vec<Excursion>,
}

impl SweepSummary {
    pub fn grid(&self) -> &ZetaGrid {
        &self.grid
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, index: usize) -> u32 {
        self.counts[index]
    }

    /// Detection dates for the `index`-th grid threshold, in ascending month
    /// order.
    pub fn detections(&self, index: usize) -> Vec<MonthIndex> {
        let zeta = self.grid.zeta(index);
        self.excursions
            .iter()
            .filter_map(|exc| exc.detection_offset(zeta))
            .map(|offset| self.window_start + offset as i32)
            .collect()
    }

    /// Grid indices whose detection count equals `target`.
    pub fn indices_with_count(&self, target: u32) -> Vec<usize> {
        (0..self.counts.len())
            .filter(|&i| self.counts[i] == target)
            .collect()
    }
}

/// Computes detections for every grid threshold at once. Equivalent, for
/// every threshold, to `run_state_machine` over the same window.
pub fn sweep_thresholds(
    indicator: &MonthlySeries,
    grid: &ZetaGrid,
    window: (MonthIndex, MonthIndex),
    zero_eps: f64,
) -> Result<SweepSummary> {
    let slice = indicator.slice(window.0, window.1)?;
    let excursions = excursion_decompose(slice.values(), zero_eps);
    let mut histogram = vec![0u32; grid.len()];
    for exc in &excursions {
        if let Some(jmax) = grid.last_index_at_or_below(exc.peak()) {
            histogram[jmax] += 1;
        }
    }
    // count at index j = excursions whose peak reaches threshold j
    let mut counts = histogram;
    for j in (0..counts.len().saturating_sub(1)).rev() {
        counts[j] += counts[j + 1];
    }
    Ok(SweepSummary {
        window_start: window.0,
        grid: *grid,
        counts,
        excursions,
    })
}

/// One indicator paired with one threshold.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct ClassifierSpec {
    pub indicator: IndicatorSpec,
    pub zeta: Zeta,
}

/// A classifier whose detection count over the training window equals the
/// event count, together with its detection dates.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfectClassifier {
    pub spec: ClassifierSpec,
    pub detections: Vec<MonthIndex>,
}

/// Keeps the thresholds of `summary` whose detection count equals `events`.
pub fn select_perfect(
    summary: &SweepSummary,
    indicator: IndicatorSpec,
    events: u32,
) -> Vec<PerfectClassifier> {
    summary
        .indices_with_count(events)
        .into_iter()
        .map(|j| PerfectClassifier {
            spec: ClassifierSpec {
                indicator,
                zeta: summary.grid.zeta(j),
            },
            detections: summary.detections(j),
        })
        .collect()
}

/// Sweeps the full (indicator grid x threshold grid) and returns the perfect
/// classifiers in canonical spec order. Data-parallel across per-leg
/// transforms; the result is identical at any parallelism degree.
pub fn sweep_perfect_grid(
    unemployment: &MonthlySeries,
    vacancy: &MonthlySeries,
    grid: &GridConfig,
    zetas: &ZetaGrid,
    window: (MonthIndex, MonthIndex),
    events: u32,
    zero_eps: f64,
) -> Result<Vec<PerfectClassifier>> {
    grid.validate()?;
    let legs = grid.leg_specs();
    let mut perfect: Vec<PerfectClassifier> = legs
        .par_iter()
        .map(|leg| -> Result<Vec<PerfectClassifier>> {
            let u_hat = materialize_leg(leg, unemployment, Direction::RiseInRecession)?;
            let v_hat = materialize_leg(leg, vacancy, Direction::FallInRecession)?;
            let mut found = Vec::new();
            for &combo in &grid.combos {
                for &delta_tenths in &grid.delta_tenths {
                    let spec = IndicatorSpec {
                        combo,
                        leg: *leg,
                        delta_tenths,
                    };
                    let combined = combine(&u_hat, &v_hat, combo, delta_tenths)?;
                    let summary = sweep_thresholds(&combined, zetas, window, zero_eps)?;
                    found.extend(select_perfect(&summary, spec, events));
                }
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    perfect.sort_unstable_by_key(|p| p.spec);
    Ok(perfect)
}

/// Perfect classifier from a single-series (per-leg) sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SinglePerfectClassifier {
    pub leg: LegSpec,
    pub zeta: Zeta,
    pub detections: Vec<MonthIndex>,
}

/// Single-series counterpart of [`sweep_perfect_grid`]: no combination
/// stage, so only the per-leg transforms are enumerated.
pub fn sweep_perfect_single(
    series: &MonthlySeries,
    direction: Direction,
    grid: &GridConfig,
    zetas: &ZetaGrid,
    window: (MonthIndex, MonthIndex),
    events: u32,
    zero_eps: f64,
) -> Result<Vec<SinglePerfectClassifier>> {
    let legs = grid.leg_specs();
    if legs.is_empty() {
        return Err(Error::Config("grid has an empty dimension".into()));
    }
    let mut perfect: Vec<SinglePerfectClassifier> = legs
        .par_iter()
        .map(|leg| -> Result<Vec<SinglePerfectClassifier>> {
            let indicator = materialize_leg(leg, series, direction)?;
            let summary = sweep_thresholds(&indicator, zetas, window, zero_eps)?;
            Ok(summary
                .indices_with_count(events)
                .into_iter()
                .map(|j| SinglePerfectClassifier {
                    leg: *leg,
                    zeta: summary.grid.zeta(j),
                    detections: summary.detections(j),
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    perfect.sort_unstable_by_key(|s| (s.leg, s.zeta));
    Ok(perfect)
}
