//! Calendar months as a flat serial index.
//!
//! All date arithmetic in the crate is in whole months. A `MonthIndex` is
//! `year * 12 + (month - 1)`, so differences between indices are calendar
//! month counts.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthIndex(i32);

impl MonthIndex {
    pub fn new(year: i32, month: u32) -> Self {
        assert!((1..=12).contains(&month), "month must be in 1..=12");
        MonthIndex(year * 12 + month as i32 - 1)
    }

    pub fn from_serial(serial: i32) -> Self {
        MonthIndex(serial)
    }

    pub fn serial(self) -> i32 {
        self.0
    }

    pub fn year(self) -> i32 {
        self.0.div_euclid(12)
    }

    /// Month of year, 1..=12.
    pub fn month(self) -> u32 {
        (self.0.rem_euclid(12) + 1) as u32
    }

    pub fn next(self) -> Self {
        MonthIndex(self.0 + 1)
    }

    pub fn prev(self) -> Self {
        MonthIndex(self.0 - 1)
    }
}

impl Add<i32> for MonthIndex {
    type Output = MonthIndex;
    fn add(self, months: i32) -> MonthIndex {
        MonthIndex(self.0 + months)
    }
}

impl Sub<i32> for MonthIndex {
    type Output = MonthIndex;
    fn sub(self, months: i32) -> MonthIndex {
        MonthIndex(self.0 - months)
    }
}

/// Difference in calendar months.
impl Sub<MonthIndex> for MonthIndex {
    type Output = i32;
    fn sub(self, other: MonthIndex) -> i32 {
        self.0 - other.0
    }
}

impl FromStr for MonthIndex {
    type Err = Error;

    /// Parses `YYYY-MM`.
    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Format {
            line: 0,
            msg: format!("expected date as YYYY-MM, got {s:?}"),
        };
        let (y, m) = s.split_once('-').ok_or_else(err)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(err());
        }
        let year: i32 = y.parse().map_err(|_| err())?;
        let month: u32 = m.parse().map_err(|_| err())?;
        if !(1..=12).contains(&month) {
            return Err(err());
        }
        Ok(MonthIndex::new(year, month))
    }
}

impl fmt::Display for MonthIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year(), self.month())
    }
}

impl fmt::Debug for MonthIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for MonthIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for MonthIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serial_is_bijective_with_year_month() {
        for serial in -1000..30000 {
            let m = MonthIndex::from_serial(serial);
            assert_eq!(MonthIndex::new(m.year(), m.month()), m);
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        let m: MonthIndex = "1929-04".parse().unwrap();
        assert_eq!(m, MonthIndex::new(1929, 4));
        assert_eq!(m.to_string(), "1929-04");
    }

    #[test]
    fn month_arithmetic() {
        let d = MonthIndex::new(1980, 6);
        let s = MonthIndex::new(1980, 2);
        assert_eq!(d - s, 4);
        assert_eq!(s + 4, d);
        assert_eq!(MonthIndex::new(2000, 12).next(), MonthIndex::new(2001, 1));
    }

    #[test]
    fn rejects_bad_dates() {
        assert!("1980-13".parse::<MonthIndex>().is_err());
        assert!("1980/02".parse::<MonthIndex>().is_err());
        assert!("80-02".parse::<MonthIndex>().is_err());
    }
}
