use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A calendar quarter, written `YYYYQn`.
///
/// Ordering is lexicographic on `(year, quarter)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuarterIndex {
    year: i32,
    quarter: u8,
}

impl QuarterIndex {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::QuarterParse {
                token: format!("{year}Q{quarter}"),
                reason: "quarter must be 1..=4".into(),
            });
        }
        Ok(Self { year, quarter })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn quarter(self) -> u8 {
        self.quarter
    }

    fn ordinal(self) -> i64 {
        i64::from(self.year) * 4 + i64::from(self.quarter) - 1
    }

    fn from_ordinal(ordinal: i64) -> Self {
        Self {
            year: ordinal.div_euclid(4) as i32,
            quarter: (ordinal.rem_euclid(4) + 1) as u8,
        }
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    pub fn pred(self) -> Self {
        self.offset(-1)
    }

    pub fn offset(self, quarters: i64) -> Self {
        Self::from_ordinal(self.ordinal() + quarters)
    }

    /// Signed number of quarters from `self` to `later`.
    pub fn distance(self, later: QuarterIndex) -> i64 {
        later.ordinal() - self.ordinal()
    }
}

/// Parses a `YYYYQn` label.
pub fn parse_quarter(text: &str) -> Result<QuarterIndex> {
    let err = |reason: &str| Error::QuarterParse {
        token: text.to_string(),
        reason: reason.to_string(),
    };
    let (year, quarter) = text.split_once('Q').ok_or_else(|| err("expected YYYYQn"))?;
    if year.is_empty() || !year.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("year must be decimal digits"));
    }
    if quarter.len() != 1 {
        return Err(err("quarter must be a single digit 1..=4"));
    }
    let year: i32 = year.parse().map_err(|_| err("year out of range"))?;
    let quarter: u8 = quarter.parse().map_err(|_| err("quarter must be a digit"))?;
    if !(1..=4).contains(&quarter) {
        return Err(err("quarter must be 1..=4"));
    }
    Ok(QuarterIndex { year, quarter })
}

impl FromStr for QuarterIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_quarter(s)
    }
}

impl fmt::Display for QuarterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl Serialize for QuarterIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuarterIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_quarter(&s).map_err(serde::de::Error::custom)
    }
}
