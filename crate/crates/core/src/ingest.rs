//! Loading, validating, splicing, and aligning the monthly input series and
//! event calendars.
//!
//! Series CSVs have a `date,value` header with `YYYY-MM` dates in ascending
//! month order and no gaps. Calendar CSVs have a `start,end` header where
//! `end` may be blank. Validation is strict: a malformed or gappy file is an
//! error, never silently repaired.

use crate::error::{Error, Result};
use crate::month::MonthIndex;
use crate::series::{MonthlySeries, RecessionCalendar};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Loads a `date,<column>` CSV into a gap-free series.
pub fn load_monthly_series(path: &Path, column: &str) -> Result<MonthlySeries> {
    let text = fs::read_to_string(path)?;
    parse_monthly_series(&text, column)
}

pub fn parse_monthly_series(text: &str, column: &str) -> Result<MonthlySeries> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Empty("series file has no header".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"date") {
        return Err(Error::Format {
            line: 1,
            msg: format!("first column must be `date`, got {header:?}"),
        });
    }
    let value_col = cols
        .iter()
        .position(|c| *c == column)
        .ok_or_else(|| Error::Format {
            line: 1,
            msg: format!("no column named {column:?} in header {header:?}"),
        })?;

    let mut start: Option<MonthIndex> = None;
    let mut values = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Format {
                line: lineno,
                msg: format!("expected {} fields, got {}", cols.len(), fields.len()),
            });
        }
        let month: MonthIndex = fields[0].parse().map_err(|e| match e {
            Error::Format { msg, .. } => Error::Format { line: lineno, msg },
            other => other,
        })?;
        let value: f64 = fields[value_col].parse().map_err(|_| Error::Format {
            line: lineno,
            msg: format!("cannot parse value {:?}", fields[value_col]),
        })?;
        match start {
            None => start = Some(month),
            Some(s) => {
                let expected = s + values.len() as i32;
                if month != expected {
                    return Err(Error::Gap(expected));
                }
            }
        }
        values.push(value);
    }
    let start = start.ok_or_else(|| Error::Empty("series file has no data rows".into()))?;
    MonthlySeries::new(start, values)
}

/// Canonical series writer: re-serializes any loaded series byte-identically.
pub fn write_monthly_series(path: &Path, series: &MonthlySeries) -> Result<()> {
    let mut out = String::from("date,value\n");
    for (month, value) in series.iter() {
        out.push_str(&format!("{month},{value}\n"));
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Loads a `start,end` calendar CSV. `end` may be blank.
pub fn load_calendar(path: &Path) -> Result<RecessionCalendar> {
    let text = fs::read_to_string(path)?;
    parse_calendar(&text)
}

pub fn parse_calendar(text: &str) -> Result<RecessionCalendar> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Empty("calendar file has no header".into()))?;
    if header != "start,end" && header != "start" {
        return Err(Error::Format {
            line: 1,
            msg: format!("expected header `start,end`, got {header:?}"),
        });
    }
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let (s, e) = line.split_once(',').unwrap_or((line, ""));
        let start: MonthIndex = s.parse().map_err(|e| match e {
            Error::Format { msg, .. } => Error::Format { line: lineno, msg },
            other => other,
        })?;
        let end = if e.is_empty() {
            None
        } else {
            Some(e.parse().map_err(|e| match e {
                Error::Format { msg, .. } => Error::Format { line: lineno, msg },
                other => other,
            })?)
        };
        starts.push(start);
        ends.push(end);
    }
    RecessionCalendar::new(starts, ends)
}

pub fn write_calendar(path: &Path, calendar: &RecessionCalendar) -> Result<()> {
    let mut out = String::from("start,end\n");
    for (s, e) in calendar.starts().iter().zip(calendar.ends()) {
        match e {
            Some(e) => out.push_str(&format!("{s},{e}\n")),
            None => out.push_str(&format!("{s},\n")),
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Elementwise `100 * count / labor_force` over the overlapping months.
pub fn compute_rate(count: &MonthlySeries, labor_force: &MonthlySeries) -> Result<MonthlySeries> {
    let (from, to) = count
        .overlap(labor_force)
        .ok_or_else(|| Error::Alignment("count and labor force do not overlap".into()))?;
    let c = count.slice(from, to)?;
    let l = labor_force.slice(from, to)?;
    let mut values = Vec::with_capacity(c.len());
    for ((m, cv), (_, lv)) in c.iter().zip(l.iter()) {
        if lv <= 0.0 {
            return Err(Error::Domain(format!("labor force {lv} at {m} is not positive")));
        }
        values.push(100.0 * cv / lv);
    }
    MonthlySeries::new(from, values)
}

/// Re-dates every value one month later, leaving values untouched.
pub fn shift_forward_one_month(series: &MonthlySeries) -> MonthlySeries {
    MonthlySeries::new(series.start() + 1, series.values().to_vec())
        .expect("shifting a valid series keeps it valid")
}

/// Joins an early proxy series onto a later series, rescaling the early part
/// so the two agree exactly at `anchor`. Months before `anchor` come from the
/// scaled early series; months from `anchor` on come from the late series.
pub fn splice_scaled(
    early: &MonthlySeries,
    late: &MonthlySeries,
    anchor: MonthIndex,
) -> Result<MonthlySeries> {
    let early_at = early.value_at(anchor).ok_or_else(|| {
        Error::Alignment(format!("anchor {anchor} outside early series"))
    })?;
    let late_at = late.value_at(anchor).ok_or_else(|| {
        Error::Alignment(format!("anchor {anchor} outside late series"))
    })?;
    if early_at <= 0.0 || late_at <= 0.0 {
        return Err(Error::Domain(format!(
            "anchor values must be positive: early {early_at}, late {late_at} at {anchor}"
        )));
    }
    let scale = late_at / early_at;
    let mut values: Vec<f64> = early
        .iter()
        .take_while(|(m, _)| *m < anchor)
        .map(|(_, v)| v * scale)
        .collect();
    values.extend(late.iter().skip_while(|(m, _)| *m < anchor).map(|(_, v)| v));
    MonthlySeries::new(early.start(), values)
}

/// A validated dataset bundle on disk: JSON manifest plus canonical CSVs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub unemployment: String,
    pub vacancy: String,
    pub calendar: String,
    pub start: MonthIndex,
    pub end: MonthIndex,
    pub events: usize,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub unemployment: MonthlySeries,
    pub vacancy: MonthlySeries,
    pub calendar: RecessionCalendar,
}

impl Dataset {
    pub fn new(
        unemployment: MonthlySeries,
        vacancy: MonthlySeries,
        calendar: RecessionCalendar,
    ) -> Result<Self> {
        if unemployment.overlap(&vacancy).is_none() {
            return Err(Error::Alignment(
                "unemployment and vacancy series do not overlap".into(),
            ));
        }
        Ok(Dataset {
            unemployment,
            vacancy,
            calendar,
        })
    }

    /// Months covered by both input series.
    pub fn common_range(&self) -> (MonthIndex, MonthIndex) {
        self.unemployment
            .overlap(&self.vacancy)
            .expect("checked at construction")
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_monthly_series(&dir.join("unemployment.csv"), &self.unemployment)?;
        write_monthly_series(&dir.join("vacancy.csv"), &self.vacancy)?;
        write_calendar(&dir.join("calendar.csv"), &self.calendar)?;
        let (start, end) = self.common_range();
        let manifest = DatasetManifest {
            unemployment: "unemployment.csv".into(),
            vacancy: "vacancy.csv".into(),
            calendar: "calendar.csv".into(),
            start,
            end,
            events: self.calendar.len(),
        };
        let json = serde_json::to_string_pretty(&manifest)?;
        fs::write(dir.join("manifest.json"), json + "\n")?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: DatasetManifest =
            serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
        let resolve = |name: &str| -> PathBuf { dir.join(name) };
        Dataset::new(
            load_monthly_series(&resolve(&manifest.unemployment), "value")?,
            load_monthly_series(&resolve(&manifest.vacancy), "value")?,
            load_calendar(&resolve(&manifest.calendar))?,
        )
    }
}
