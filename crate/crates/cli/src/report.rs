//! Tabular results and their CSV / JSON renderings.

use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::svg::Plot;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Null,
    /// Key/value bundle: `k=v;k=v` in CSV, an object in JSON.
    Map(Vec<(String, Cell)>),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Rust float formatting is locale-free and round-trips.
            Cell::Num(v) if v.is_finite() && *v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e15) => format!("{v:e}"),
            Cell::Num(v) if v.is_finite() => format!("{v}"),
            Cell::Num(v) if v.is_nan() => "nan".into(),
            Cell::Num(v) => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
            Cell::Map(kv) => kv
                .iter()
                .map(|(k, v)| format!("{k}={}", v.csv()))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }

    fn json(&self) -> Value {
        match self {
            // JSON has no infinities; unbounded and undefined become null.
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) | Cell::Null => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Map(kv) => Value::Object(kv.iter().map(|(k, v)| (k.clone(), v.json())).collect()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// One-line human summaries, also emitted as CSV metadata.
    pub notes: Vec<String>,
    /// Extra top-level JSON members.
    pub extra: Map<String, Value>,
    /// Report a single row as a `result` object rather than a `rows` array.
    pub single: bool,
    pub plot: Option<Plot>,
    /// Rows that could not be computed; a non-empty list fails the run.
    pub failures: Vec<String>,
}

impl Report {
    pub fn render(&self, cfg: &RunConfig) -> Result<String> {
        match cfg.format {
            Format::Csv => self.csv(cfg),
            Format::Json => Ok(self.json(cfg)),
            Format::Svg => self
                .plot
                .as_ref()
                .map(Plot::render)
                .ok_or_else(|| {
                    CliError::Usage(format!("{} has no SVG output", cfg.command.name()))
                }),
        }
    }

    fn csv(&self, cfg: &RunConfig) -> Result<String> {
        let mut out = String::new();
        for (k, v) in header(cfg) {
            out.push_str(&format!("# {k}: {}\n", value_text(&v)));
        }
        for note in &self.notes {
            out.push_str(&format!("# note: {note}\n"));
        }
        for f in &self.failures {
            out.push_str(&format!("# failed: {f}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Output(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.into_error()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is UTF-8"));
        Ok(out)
    }

    fn json(&self, cfg: &RunConfig) -> String {
        let mut top: Map<String, Value> = header(cfg).into_iter().collect();
        let objects: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect(),
                )
            })
            .collect();
        if self.single && objects.len() == 1 {
            top.insert("result".into(), objects.into_iter().next().expect("one row"));
        } else {
            top.insert("rows".into(), Value::Array(objects));
        }
        if !self.notes.is_empty() {
            top.insert("notes".into(), json!(self.notes));
        }
        top.insert("failures".into(), json!(self.failures));
        top.extend(self.extra.clone());
        let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
        text.push('\n');
        text
    }
}

/// Provenance shared by every format: tool, version, command, the resolved
/// configuration and, unless deterministic output was requested, a
/// timestamp.
fn header(cfg: &RunConfig) -> Vec<(String, Value)> {
    let mut h = vec![
        ("tool".to_string(), json!("photon-reader")),
        ("version".to_string(), json!(env!("CARGO_PKG_VERSION"))),
        ("command".to_string(), json!(cfg.command.name())),
        ("config".to_string(), serde_json::to_value(cfg).expect("config serializes")),
    ];
    if !cfg.deterministic {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        h.push(("generated_at_unix".to_string(), json!(now)));
    }
    h
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
