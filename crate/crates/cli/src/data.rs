//! CSV reading and writing.
//!
//! Every file the tool writes is a plain table: optional `# key=value`
//! metadata lines, one header row, then numeric rows. Numbers are written
//! with Rust's shortest round-trip formatting, so reading a file back yields
//! the identical `f64` values.
//!
//! Measured data uses the header `delay_s,value,sigma`, where `sigma` may be
//! left empty or omitted:
//!
//! ```text
//! # y_kind=zeeman_splitting_uev
//! # helicity=sigma+
//! delay_s,value,sigma
//! 0,98.1,0.5
//! 5,96.4,0.5
//! ```

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use spindiff_core::{DecaySeries, YKind};

use crate::error::{CliError, Result};

/// Shortest round-trip text for `v`, switching to exponent notation for
/// very large or very small magnitudes.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// A parsed CSV table. Empty cells read as `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let data_err = |message: String| CliError::Data {
            path: path.to_path_buf(),
            message,
        };
        let mut metadata = BTreeMap::new();
        let mut body = String::new();
        for (n, line) in text.lines().enumerate() {
            if let Some(comment) = line.strip_prefix('#') {
                let (key, value) = comment
                    .split_once('=')
                    .ok_or_else(|| data_err(format!("line {}: metadata must look like `# key=value`", n + 1)))?;
                metadata.insert(key.trim().to_string(), value.trim().to_string());
            } else if !line.trim().is_empty() {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| data_err(e.to_string()))?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        if columns.is_empty() || columns.iter().all(|c| c.is_empty()) {
            return Err(data_err("missing header row".into()));
        }
        let mut rows = Vec::new();
        for (n, record) in reader.records().enumerate() {
            let record = record.map_err(|e| data_err(e.to_string()))?;
            let row = record
                .iter()
                .map(|cell| {
                    let cell = cell.trim();
                    if cell.is_empty() {
                        Ok(f64::NAN)
                    } else {
                        cell.parse::<f64>()
                            .map_err(|_| data_err(format!("row {}: `{cell}` is not a number", n + 1)))
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(Self {
            metadata,
            columns,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| if v.is_nan() { String::new() } else { fmt_num(*v) })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        file.write_all(self.to_csv_string().as_bytes())
            .map_err(|e| CliError::io(path, e))
    }
}

/// Measured observable with optional per-point uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredData {
    pub series: DecaySeries,
    pub sigma: Vec<Option<f64>>,
}

pub const MEASURED_COLUMNS: [&str; 3] = ["delay_s", "value", "sigma"];

impl MeasuredData {
    pub fn from_table(table: Table, path: &Path) -> Result<Self> {
        let data_err = |message: String| CliError::Data {
            path: path.to_path_buf(),
            message,
        };
        let cols: Vec<&str> = table.columns.iter().map(String::as_str).collect();
        if cols != MEASURED_COLUMNS[..2] && cols != MEASURED_COLUMNS {
            return Err(data_err(format!(
                "header must be `delay_s,value,sigma`, got `{}`",
                cols.join(",")
            )));
        }
        let y_kind = match table.metadata.get("y_kind") {
            None => YKind::ZeemanSplitting,
            Some(s) => YKind::parse(s).ok_or_else(|| data_err(format!("unknown y_kind `{s}`")))?,
        };
        let mut points = Vec::with_capacity(table.rows.len());
        let mut sigma = Vec::with_capacity(table.rows.len());
        for (n, row) in table.rows.iter().enumerate() {
            if row.len() != cols.len() {
                return Err(data_err(format!(
                    "row {} has {} cells, expected {}",
                    n + 1,
                    row.len(),
                    cols.len()
                )));
            }
            let (t, y) = (row[0], row[1]);
            if !t.is_finite() || !y.is_finite() {
                return Err(data_err(format!(
                    "row {}: delay_s and value are required and finite",
                    n + 1
                )));
            }
            if let Some(&(prev, _)) = points.last() {
                if !(t > prev) {
                    return Err(data_err(format!(
                        "row {}: delay_s must be strictly increasing ({t} after {prev})",
                        n + 1
                    )));
                }
            }
            let s = row.get(2).copied().filter(|s| !s.is_nan());
            if let Some(s) = s {
                if !(s > 0.0) || !s.is_finite() {
                    return Err(data_err(format!("row {}: sigma must be > 0, got {s}", n + 1)));
                }
            }
            points.push((t, y));
            sigma.push(s);
        }
        if points.is_empty() {
            return Err(data_err("no data rows".into()));
        }
        let mut series = DecaySeries::new(points, y_kind).map_err(|e| data_err(e.to_string()))?;
        series.metadata = table.metadata.clone();
        Ok(Self { series, sigma })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_table(Table::read(path)?, path)
    }

    pub fn to_table(&self) -> Table {
        let mut table = Table::new(&MEASURED_COLUMNS);
        table.metadata = self.series.metadata.clone();
        table
            .metadata
            .insert("y_kind".into(), self.series.y_kind.as_str().into());
        for (&(t, y), s) in self.series.points().iter().zip(&self.sigma) {
            table.push(vec![t, y, s.unwrap_or(f64::NAN)]);
        }
        table
    }
}
