use serde::{Deserialize, Serialize};

use super::frame::Frame;
use super::quarter::QuarterIndex;
use crate::error::{Error, Result};
use crate::report::{sig, TextTable};

/// Descriptive statistics for a single column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub name: String,
    pub mean: f64,
    /// Sample standard deviation (divisor `n − 1`; zero when `n = 1`).
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub first_quarter: QuarterIndex,
    pub last_quarter: QuarterIndex,
    pub columns: Vec<ColumnStats>,
}

pub fn column_stats(name: &str, values: &[f64]) -> Result<ColumnStats> {
    if values.is_empty() {
        return Err(Error::insufficient(format!("statistics of {name:?}"), 1, 0));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let sd = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // summation rounding can push the mean a hair outside [min, max]
    let mean = mean.clamp(min, max);
    Ok(ColumnStats {
        name: name.to_string(),
        mean,
        sd,
        min,
        max,
        count: n,
    })
}

pub fn summary_stats(frame: &Frame) -> Result<StatsReport> {
    let columns = frame
        .columns()
        .iter()
        .map(|c| column_stats(&c.name, c.values()))
        .collect::<Result<Vec<_>>>()?;
    Ok(StatsReport {
        first_quarter: frame.start(),
        last_quarter: frame.end(),
        columns,
    })
}

impl StatsReport {
    pub fn get(&self, name: &str) -> Option<&ColumnStats> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn to_table(&self) -> TextTable {
        let mut t = TextTable::new(["Variable", "Mean", "Standard Deviation", "Minimum", "Maximum", "N"]);
        let n = self.columns.first().map_or(0, |c| c.count);
        t.row([
            "quarter".to_string(),
            "n/a".into(),
            "n/a".into(),
            self.first_quarter.to_string(),
            self.last_quarter.to_string(),
            n.to_string(),
        ]);
        for c in &self.columns {
            t.row([
                c.name.clone(),
                sig(c.mean),
                sig(c.sd),
                sig(c.min),
                sig(c.max),
                c.count.to_string(),
            ]);
        }
        t
    }
}
