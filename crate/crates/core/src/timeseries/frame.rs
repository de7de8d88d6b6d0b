use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::quarter::{parse_quarter, QuarterIndex};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Variable order of the reference panel, which also fixes the Cholesky
/// ordering used for orthogonalized responses.
pub const DEFAULT_COLUMNS: [&str; 6] = [
    "output",
    "price",
    "employment",
    "wages",
    "exchange_rate",
    "num_firms",
];

/// A named quarterly series with no gaps or missing values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    #[serde(default)]
    pub units: String,
    pub start: QuarterIndex,
    values: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, start: QuarterIndex, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::insufficient(format!("series {name:?}"), 1, 0));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                series: name,
                index,
            });
        }
        Ok(Self {
            name,
            units: String::new(),
            start,
            values,
        })
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end(&self) -> QuarterIndex {
        self.start.offset(self.values.len() as i64 - 1)
    }

    /// Position of `quarter` in this series, if covered.
    pub fn position(&self, quarter: QuarterIndex) -> Option<usize> {
        let d = self.start.distance(quarter);
        (d >= 0 && (d as usize) < self.values.len()).then_some(d as usize)
    }

    pub fn get(&self, quarter: QuarterIndex) -> Option<f64> {
        self.position(quarter).map(|i| self.values[i])
    }
}

/// A quarterly panel of aligned series. Column order is significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    start: QuarterIndex,
    columns: Vec<Series>,
}

impl Frame {
    pub fn new(columns: Vec<Series>) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::insufficient("frame columns", 1, 0))?;
        let (start, len) = (first.start, first.len());
        let mut seen = HashSet::new();
        for col in &columns {
            if !seen.insert(col.name.as_str()) {
                return Err(Error::DuplicateColumn {
                    column: col.name.clone(),
                });
            }
            if col.start != start || col.len() != len {
                return Err(Error::Dimension(format!(
                    "column {:?} spans {}..{} but frame spans {}..{}",
                    col.name,
                    col.start,
                    col.end(),
                    start,
                    first.end()
                )));
            }
        }
        Ok(Self { start, columns })
    }

    /// Builds a frame from a `T × K` matrix whose columns follow `names`.
    pub fn from_matrix<S: AsRef<str>>(start: QuarterIndex, names: &[S], data: &Matrix) -> Result<Self> {
        if names.len() != data.ncols() {
            return Err(Error::Dimension(format!(
                "{} names for {} columns",
                names.len(),
                data.ncols()
            )));
        }
        let columns = names
            .iter()
            .enumerate()
            .map(|(j, name)| Series::new(name.as_ref(), start, data.column(j).iter().copied().collect()))
            .collect::<Result<Vec<_>>>()?;
        Frame::new(columns)
    }

    pub fn start(&self) -> QuarterIndex {
        self.start
    }

    pub fn end(&self) -> QuarterIndex {
        self.start.offset(self.len() as i64 - 1)
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of variables.
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn quarter(&self, row: usize) -> QuarterIndex {
        self.start.offset(row as i64)
    }

    pub fn quarters(&self) -> impl Iterator<Item = QuarterIndex> + '_ {
        (0..self.len()).map(|i| self.quarter(i))
    }

    pub fn row_of(&self, quarter: QuarterIndex) -> Option<usize> {
        self.columns[0].position(quarter)
    }

    pub fn columns(&self) -> &[Series] {
        &self.columns
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Result<&Series> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c.values[row]).collect()
    }

    /// `T × K` data matrix in column order.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.len(), self.width(), |i, j| self.columns[j].values[i])
    }

    /// Reorders or subsets columns.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Frame> {
        let columns = names
            .iter()
            .map(|n| self.column(n.as_ref()).cloned())
            .collect::<Result<Vec<_>>>()?;
        Frame::new(columns)
    }

    /// Rows `from..to` (exclusive end).
    pub fn slice(&self, from: usize, to: usize) -> Result<Frame> {
        if from >= to || to > self.len() {
            return Err(Error::OutOfRange(
                format!("rows {from}..{to}"),
                "0".into(),
                self.len().to_string(),
            ));
        }
        let start = self.quarter(from);
        let columns = self
            .columns
            .iter()
            .map(|c| Series {
                name: c.name.clone(),
                units: c.units.clone(),
                start,
                values: c.values[from..to].to_vec(),
            })
            .collect();
        Ok(Frame { start, columns })
    }

    /// Appends `other` directly after this frame's last quarter.
    pub fn append(&self, other: &Frame) -> Result<Frame> {
        if other.start != self.end().succ() {
            return Err(Error::NonContiguous {
                row: self.len(),
                expected: self.end().succ().to_string(),
                found: other.start.to_string(),
            });
        }
        if other.names() != self.names() {
            return Err(Error::Dimension("appended frame has different columns".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut values = a.values.clone();
                values.extend_from_slice(&b.values);
                Series {
                    name: a.name.clone(),
                    units: a.units.clone(),
                    start: self.start,
                    values,
                }
            })
            .collect();
        Ok(Frame {
            start: self.start,
            columns,
        })
    }

    /// Copy with a column's values replaced by `replacement` (same length).
    pub fn with_column(&self, replacement: Series) -> Result<Frame> {
        let idx = self
            .column_index(&replacement.name)
            .ok_or_else(|| Error::UnknownVariable(replacement.name.clone()))?;
        let mut columns = self.columns.clone();
        columns[idx] = replacement;
        Frame::new(columns)
    }

    /// Writes the frame as CSV with a leading `quarter` column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error, row| Error::Csv {
            path: "<output>".into(),
            row,
            message: e.to_string(),
        };
        let mut header = vec!["quarter".to_string()];
        header.extend(self.names());
        wtr.write_record(&header).map_err(|e| csv_err(e, 1))?;
        for i in 0..self.len() {
            let mut record = vec![self.quarter(i).to_string()];
            record.extend(self.columns.iter().map(|c| c.values[i].to_string()));
            wtr.write_record(&record).map_err(|e| csv_err(e, i + 2))?;
        }
        wtr.flush().map_err(|e| Error::Io {
            path: "<output>".into(),
            source: e,
        })
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Reads a frame from a CSV file, keeping only `schema` columns in that order.
///
/// An empty schema keeps every non-quarter column in file order.
pub fn load_frame<S: AsRef<str>>(path: &Path, schema: &[S]) -> Result<Frame> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_frame(file, path, schema)
}

/// Like [`load_frame`], reading from any source. `origin` labels errors.
pub fn read_frame<R: Read, S: AsRef<str>>(reader: R, origin: &Path, schema: &[S]) -> Result<Frame> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::None)
        .from_reader(reader);
    let csv_err = |e: csv::Error, row: usize| Error::Csv {
        path: origin.to_path_buf(),
        row,
        message: e.to_string(),
    };
    let mut records = rdr.records();
    let header = match records.next() {
        None => {
            return Err(Error::EmptyFile {
                path: origin.to_path_buf(),
            })
        }
        Some(rec) => rec.map_err(|e| csv_err(e, 1))?,
    };
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    let wanted: Vec<String> = if schema.is_empty() {
        names.iter().skip(1).cloned().collect()
    } else {
        schema.iter().map(|s| s.as_ref().to_string()).collect()
    };
    let positions = wanted
        .iter()
        .map(|w| {
            names
                .iter()
                .skip(1)
                .position(|n| n == w)
                .map(|p| p + 1)
                .ok_or_else(|| Error::MissingColumn { column: w.clone() })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut start: Option<QuarterIndex> = None;
    let mut prev: Option<QuarterIndex> = None;
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); wanted.len()];
    for (i, rec) in records.enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| csv_err(e, line))?;
        let label = rec.get(0).unwrap_or("").trim();
        let q = parse_quarter(label)?;
        if let Some(p) = prev {
            if q != p.succ() {
                return Err(Error::NonContiguous {
                    row: line,
                    expected: p.succ().to_string(),
                    found: q.to_string(),
                });
            }
        } else {
            start = Some(q);
        }
        prev = Some(q);
        for (j, &pos) in positions.iter().enumerate() {
            let cell = rec.get(pos).unwrap_or("").trim();
            let value: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                Error::NonNumeric {
                    row: line,
                    column: wanted[j].clone(),
                    value: cell.to_string(),
                }
            })?;
            data[j].push(value);
        }
    }
    let start = start.ok_or_else(|| Error::EmptyFile {
        path: origin.to_path_buf(),
    })?;
    let columns = wanted
        .into_iter()
        .zip(data)
        .map(|(name, values)| Series::new(name, start, values))
        .collect::<Result<Vec<_>>>()?;
    Frame::new(columns)
}

/// `x_t − x_{t−1}` for every column; the result starts one quarter later.
pub fn first_difference(frame: &Frame) -> Result<Frame> {
    if frame.len() < 2 {
        return Err(Error::insufficient("first difference", 2, frame.len()));
    }
    let start = frame.start.succ();
    let columns = frame
        .columns
        .iter()
        .map(|c| difference_series(c).map(|s| Series { start, ..s }))
        .collect::<Result<Vec<_>>>()?;
    Frame::new(columns)
}

pub fn difference_series(series: &Series) -> Result<Series> {
    if series.len() < 2 {
        return Err(Error::insufficient("first difference", 2, series.len()));
    }
    let values = series.values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(Series::new(series.name.clone(), series.start.succ(), values)?.with_units(series.units.clone()))
}

/// Aligned lag design for a frame.
#[derive(Debug, Clone)]
pub struct LagDesign {
    /// Current values `X_t`, one row per usable observation.
    pub targets: Matrix,
    /// `[X_{t−1} | X_{t−2} | … | X_{t−p}]`, `K` columns per lag block.
    pub lags: Matrix,
    /// Quarter of the first target row.
    pub start: QuarterIndex,
}

impl LagDesign {
    pub fn rows(&self) -> usize {
        self.targets.nrows()
    }
}

/// Stacks `p` lags of every column; `T − p` rows remain usable.
pub fn lag_matrix(frame: &Frame, p: usize) -> Result<LagDesign> {
    if p == 0 {
        return Err(Error::Domain("lag count must be at least 1".into()));
    }
    if p >= frame.len() {
        return Err(Error::insufficient(format!("{p} lags"), p + 1, frame.len()));
    }
    let data = frame.to_matrix();
    let (n, k) = (frame.len() - p, frame.width());
    let targets = data.rows(p, n).into_owned();
    let lags = Matrix::from_fn(n, k * p, |i, c| {
        let (lag, var) = (c / k + 1, c % k);
        data[(p + i - lag, var)]
    });
    Ok(LagDesign {
        targets,
        lags,
        start: frame.quarter(p),
    })
}
