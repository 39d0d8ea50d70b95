//! Rectangular result tables and their CSV / JSON / sidecar export.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// Token written for the `+inf` sentinel.
pub const INF_TOKEN: &str = "inf";

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    name: String,
    columns: Vec<String>,
    /// Columns where `+inf` is a legal sentinel value.
    sentinel: Vec<bool>,
    rows: Vec<Vec<f64>>,
    /// Scalar results such as maxima and crossing points.
    pub summary: BTreeMap<String, f64>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(name: impl Into<String>, columns: impl IntoIterator<Item = S>) -> Self {
        let columns: Vec<String> = columns.into_iter().map(Into::into).collect();
        let sentinel = vec![false; columns.len()];
        Self { name: name.into(), columns, sentinel, rows: Vec::new(), summary: BTreeMap::new() }
    }

    /// Allows `+inf` in `column`.
    pub fn with_sentinel(mut self, column: &str) -> Self {
        if let Some(i) = self.columns.iter().position(|c| c == column) {
            self.sentinel[i] = true;
        }
        self
    }

    /// Allows `+inf` everywhere.
    pub fn with_sentinel_all(mut self) -> Self {
        self.sentinel.fill(true);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row, rejecting wrong widths, NaN and infinities outside
    /// sentinel columns.
    pub fn push(&mut self, row: Vec<f64>) -> CliResult<()> {
        if row.len() != self.columns.len() {
            return Err(CliError::Table(format!(
                "{}: row has {} values for {} columns",
                self.name,
                row.len(),
                self.columns.len()
            )));
        }
        for (i, v) in row.iter().enumerate() {
            let ok = v.is_finite() || (self.sentinel[i] && *v == f64::INFINITY);
            if !ok {
                return Err(CliError::Table(format!(
                    "{}: value {v} in column `{}` at row {}",
                    self.name,
                    self.columns[i],
                    self.rows.len()
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CliError::Table(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_value(v))).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Array of `{column: value}` records; the sentinel becomes the string
    /// `"inf"`.
    pub fn to_json(&self) -> Value {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, &v) in self.columns.iter().zip(row) {
                    let val = if v.is_finite() { json!(v) } else { json!(INF_TOKEN) };
                    m.insert(c.clone(), val);
                }
                Value::Object(m)
            })
            .collect();
        Value::Array(records)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> CliResult<()> {
        serde_json::to_writer_pretty(&mut out, &self.to_json()).map_err(|e| CliError::Table(e.to_string()))?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write(&self, format: Format, out: impl Write) -> CliResult<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }
}

/// 17 significant digits, round-trip exact.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        INF_TOKEN.to_string()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Provenance written next to every exported table.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub command: String,
    pub preset: Option<String>,
    pub config_hash: String,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub table: String,
    pub columns: Vec<String>,
    pub rows: usize,
    pub summary: BTreeMap<String, f64>,
}

/// Path of a secondary table: `out.csv` becomes `out.<name>.csv`.
pub fn companion_path(out: &Path, name: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    out.with_file_name(format!("{stem}.{name}{ext}"))
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}
