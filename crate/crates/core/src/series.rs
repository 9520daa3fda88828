//! Gap-free monthly time series and event calendars.

use crate::error::{Error, Result};
use crate::month::MonthIndex;
use serde::{Deserialize, Serialize};

/// A contiguous monthly series: value `i` belongs to month `start + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlySeries {
    start: MonthIndex,
    values: Vec<f64>,
}

impl MonthlySeries {
    pub fn new(start: MonthIndex, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("monthly series must have at least one value".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite value at {}",
                start + i as i32
            )));
        }
        Ok(MonthlySeries { start, values })
    }

    pub fn start(&self) -> MonthIndex {
        self.start
    }

    /// Last covered month.
    pub fn end(&self) -> MonthIndex {
        self.start + (self.values.len() as i32 - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: length >= 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn covers(&self, m: MonthIndex) -> bool {
        m >= self.start && m <= self.end()
    }

    pub fn index_of(&self, m: MonthIndex) -> Option<usize> {
        self.covers(m).then(|| (m - self.start) as usize)
    }

    pub fn value_at(&self, m: MonthIndex) -> Option<f64> {
        self.index_of(m).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (MonthIndex, f64)> + '_ {
        let start = self.start;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (start + i as i32, v))
    }

    /// Copy of the sub-series covering `[from, to]`.
    pub fn slice(&self, from: MonthIndex, to: MonthIndex) -> Result<MonthlySeries> {
        if from > to {
            return Err(Error::Alignment(format!("window {from}..{to} is empty")));
        }
        let (a, b) = match (self.index_of(from), self.index_of(to)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Alignment(format!(
                    "window {from}..{to} outside series {}..{}",
                    self.start,
                    self.end()
                )))
            }
        };
        MonthlySeries::new(from, self.values[a..=b].to_vec())
    }

    /// Month range shared with another series, if any.
    pub fn overlap(&self, other: &MonthlySeries) -> Option<(MonthIndex, MonthIndex)> {
        let from = self.start.max(other.start);
        let to = self.end().min(other.end());
        (from <= to).then_some((from, to))
    }

    /// Applies `f` elementwise, keeping the month range.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> MonthlySeries {
        MonthlySeries {
            start: self.start,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Ordered start months of official events (recessions or placebo events),
/// with optional end months.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecessionCalendar {
    starts: Vec<MonthIndex>,
    ends: Vec<Option<MonthIndex>>,
}

impl RecessionCalendar {
    pub fn new(starts: Vec<MonthIndex>, ends: Vec<Option<MonthIndex>>) -> Result<Self> {
        if starts.is_empty() {
            return Err(Error::Empty("calendar has no events".into()));
        }
        if ends.len() != starts.len() {
            return Err(Error::Config("calendar starts/ends length mismatch".into()));
        }
        for w in starts.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Order(w[1]));
            }
        }
        for (s, e) in starts.iter().zip(&ends) {
            if let Some(e) = e {
                if e < s {
                    return Err(Error::Order(*e));
                }
            }
        }
        Ok(RecessionCalendar { starts, ends })
    }

    pub fn from_starts(starts: Vec<MonthIndex>) -> Result<Self> {
        let ends = vec![None; starts.len()];
        RecessionCalendar::new(starts, ends)
    }

    pub fn starts(&self) -> &[MonthIndex] {
        &self.starts
    }

    pub fn ends(&self) -> &[Option<MonthIndex>] {
        &self.ends
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// Event starts falling inside `[from, to]`.
    pub fn starts_in(&self, from: MonthIndex, to: MonthIndex) -> Vec<MonthIndex> {
        self.starts
            .iter()
            .copied()
            .filter(|&s| s >= from && s <= to)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(y: i32, mo: u32) -> MonthIndex {
        MonthIndex::new(y, mo)
    }

    #[test]
    fn series_indexing() {
        let s = MonthlySeries::new(m(1929, 4), vec![3.2, 3.1, 3.0]).unwrap();
        assert_eq!(s.end(), m(1929, 6));
        assert_eq!(s.value_at(m(1929, 5)), Some(3.1));
        assert_eq!(s.value_at(m(1929, 7)), None);
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(MonthlySeries::new(m(2000, 1), vec![]).is_err());
        assert!(MonthlySeries::new(m(2000, 1), vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn slice_and_overlap() {
        let a = MonthlySeries::new(m(2000, 1), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = MonthlySeries::new(m(2000, 3), vec![9.0, 8.0, 7.0]).unwrap();
        assert_eq!(a.overlap(&b), Some((m(2000, 3), m(2000, 4))));
        let s = a.slice(m(2000, 2), m(2000, 3)).unwrap();
        assert_eq!(s.values(), &[2.0, 3.0]);
        assert!(a.slice(m(1999, 12), m(2000, 2)).is_err());
    }

    #[test]
    fn calendar_ordering_enforced() {
        assert!(RecessionCalendar::from_starts(vec![m(1980, 2), m(1980, 2)]).is_err());
        assert!(RecessionCalendar::from_starts(vec![m(1981, 8), m(1980, 2)]).is_err());
        let c = RecessionCalendar::from_starts(vec![m(1980, 2), m(1981, 8)]).unwrap();
        assert_eq!(c.starts_in(m(1980, 1), m(1980, 12)), vec![m(1980, 2)]);
    }
}
