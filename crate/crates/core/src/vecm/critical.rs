use serde::{Deserialize, Serialize};

/// 5% trace-test critical values, unrestricted constant, for `K − r = 1..=11`
/// (Osterwald-Lenum 1992, Table 1).
const TRACE_5PCT_CONSTANT: [f64; 11] = [
    3.76, 15.41, 29.68, 47.21, 68.52, 94.15, 124.24, 156.00, 192.89, 233.13, 277.71,
];

/// Critical values indexed by the number of common trends under the null, `K − r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCriticalValues {
    /// `values[d − 1]` is the critical value for `K − r = d`.
    values: Vec<f64>,
    pub level: f64,
}

impl TraceCriticalValues {
    pub fn five_percent() -> Self {
        Self {
            values: TRACE_5PCT_CONSTANT.to_vec(),
            level: 0.05,
        }
    }

    /// Custom table; `values[d − 1]` applies to `K − r = d`.
    pub fn from_values(values: Vec<f64>, level: f64) -> Self {
        Self { values, level }
    }

    pub fn get(&self, common_trends: usize) -> Option<f64> {
        common_trends.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    pub fn max_trends(&self) -> usize {
        self.values.len()
    }
}
