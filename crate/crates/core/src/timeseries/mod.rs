//! Quarterly panel data: indexing, CSV ingestion, transformations and
//! descriptive statistics.

mod frame;
mod quarter;
mod regional;
mod stats;

pub use frame::{
    difference_series, first_difference, lag_matrix, load_frame, read_frame, Frame, LagDesign, Series,
    DEFAULT_COLUMNS,
};
pub use quarter::{parse_quarter, QuarterIndex};
pub use regional::{location_quotient, proxy_quarterly_output};
pub use stats::{column_stats, summary_stats, ColumnStats, StatsReport};
