//! Readers and writers for the pipeline's file artifacts: perfect-classifier
//! tables, frontier tables, probability timelines, trained ensembles, and run
//! reports.
//!
//! All writers produce canonical output: fixed column order, shortest
//! round-tripping float formatting, `\n` line endings. Writing the same value
//! twice yields byte-identical files.

use crate::classifier::{ClassifierSpec, PerfectClassifier, Zeta};
use crate::error::{Error, Result};
use crate::frontier::{ClassifierStats, Frontier};
use crate::indicator::{IndicatorSeries, IndicatorSpec, LegSpec};
use crate::month::MonthIndex;
use crate::probability::{Ensemble, ProbabilityTimeline};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

fn tenths_str(tenths: u8) -> String {
    format!("{}.{}", tenths / 10, tenths % 10)
}

fn spec_fields(spec: &IndicatorSpec) -> [String; 6] {
    [
        spec.combo.to_string(),
        spec.leg.smoothing.method_name().to_string(),
        spec.leg.smoothing.alpha_string(),
        spec.leg.beta.to_string(),
        tenths_str(spec.leg.gamma_tenths),
        tenths_str(spec.delta_tenths),
    ]
}

fn spec_from_fields(
    combo: &str,
    method: &str,
    alpha: &str,
    beta: &str,
    gamma: &str,
    delta: &str,
) -> Result<IndicatorSpec> {
    IndicatorSpec::from_str(&format!(
        "combo={combo},smooth={method}:{alpha},beta={beta},gamma={gamma},delta={delta}"
    ))
}

pub const PERFECT_HEADER: &str = "combo,smooth_method,alpha,beta,gamma,delta,zeta,detections";

/// Writes one row per perfect classifier. Detection dates are
/// semicolon-separated `YYYY-MM` values inside the last column.
pub fn write_perfect_csv(path: &Path, perfect: &[PerfectClassifier]) -> Result<()> {
    let mut out = String::with_capacity(64 * (perfect.len() + 1));
    out.push_str(PERFECT_HEADER);
    out.push('\n');
    for p in perfect {
        let [combo, method, alpha, beta, gamma, delta] = spec_fields(&p.spec.indicator);
        let dates: Vec<String> = p.detections.iter().map(|d| d.to_string()).collect();
        writeln!(
            out,
            "{combo},{method},{alpha},{beta},{gamma},{delta},{},{}",
            p.spec.zeta,
            dates.join(";")
        )
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_perfect_csv(path: &Path) -> Result<Vec<PerfectClassifier>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == PERFECT_HEADER => {}
        _ => {
            return Err(Error::Format {
                line: 1,
                msg: format!("expected header `{PERFECT_HEADER}`"),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Format {
                line: i + 1,
                msg: format!("expected 8 fields, found {}", fields.len()),
            });
        }
        let bad = |msg: String| Error::Format { line: i + 1, msg };
        let indicator =
            spec_from_fields(fields[0], fields[1], fields[2], fields[3], fields[4], fields[5])
                .map_err(|e| bad(e.to_string()))?;
        let zeta_value: f64 = fields[6]
            .parse()
            .map_err(|_| bad(format!("bad threshold `{}`", fields[6])))?;
        let zeta = Zeta::from_value(zeta_value).map_err(|e| bad(e.to_string()))?;
        let mut detections = Vec::new();
        if !fields[7].is_empty() {
            for part in fields[7].split(';') {
                detections.push(
                    MonthIndex::from_str(part)
                        .map_err(|_| bad(format!("bad detection date `{part}`")))?,
                );
            }
        }
        out.push(PerfectClassifier {
            spec: ClassifierSpec { indicator, zeta },
            detections,
        });
    }
    Ok(out)
}

pub const STATS_HEADER: &str = "mu,sigma,combo,smooth_method,alpha,beta,gamma,delta,zeta";

/// Writes classifier error statistics, one row per classifier, in the order
/// given. Used for both the frontier table and full scatter exports.
pub fn write_stats_csv(path: &Path, stats: &[ClassifierStats]) -> Result<()> {
    let mut out = String::with_capacity(64 * (stats.len() + 1));
    out.push_str(STATS_HEADER);
    out.push('\n');
    for s in stats {
        let [combo, method, alpha, beta, gamma, delta] = spec_fields(&s.spec.indicator);
        writeln!(
            out,
            "{},{},{combo},{method},{alpha},{beta},{gamma},{delta},{}",
            s.mu, s.sigma, s.spec.zeta
        )
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_frontier_csv(path: &Path, frontier: &Frontier) -> Result<()> {
    write_stats_csv(path, frontier.points())
}

/// Writes the timeline as `date,p_ensemble,p_1,...,p_n`. The file parses as a
/// monthly series on any of its probability columns.
pub fn write_timeline_csv(path: &Path, timeline: &ProbabilityTimeline) -> Result<()> {
    let n = timeline.per_classifier.len();
    let mut out = String::new();
    out.push_str("date,p_ensemble");
    for k in 1..=n {
        write!(out, ",p_{k}").expect("string write");
    }
    out.push('\n');
    for (i, &p) in timeline.ensemble.iter().enumerate() {
        write!(out, "{},{p}", timeline.start + i as i32).expect("string write");
        for track in &timeline.per_classifier {
            write!(out, ",{}", track[i]).expect("string write");
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes `date,indicator` rows, with a constant `threshold` column when a
/// threshold is given. Meant for plotting indicator traces.
pub fn write_indicator_trace(
    path: &Path,
    indicator: &IndicatorSeries,
    zeta: Option<Zeta>,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(if zeta.is_some() {
        "date,indicator,threshold\n"
    } else {
        "date,indicator\n"
    });
    for (month, value) in indicator.series.iter() {
        match zeta {
            Some(z) => writeln!(out, "{month},{value},{z}"),
            None => writeln!(out, "{month},{value}"),
        }
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn save_ensemble(path: &Path, ensemble: &Ensemble) -> Result<()> {
    save_json(path, ensemble)
}

pub fn load_ensemble(path: &Path) -> Result<Ensemble> {
    let text = fs::read_to_string(path)?;
    let ensemble: Ensemble = serde_json::from_str(&text)?;
    ensemble.validate()?;
    Ok(ensemble)
}

/// Pretty-printed JSON with a trailing newline.
pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Expands a single-series leg classifier into the combined-spec form that
/// reproduces it exactly: a linear combination with weight 1 is the rise leg
/// alone, weight 0 the fall leg alone.
pub fn single_leg_spec(leg: LegSpec, rise: bool) -> IndicatorSpec {
    IndicatorSpec {
        combo: crate::indicator::Combo::Linear,
        leg,
        delta_tenths: if rise { 10 } else { 0 },
    }
}
