//! Command output as JSON (schema 1) or CSV.
//!
//! Every command produces one [`Report`]: a fixed-column table plus scalar
//! summaries. JSON nests the table rows under `results.rows`; CSV emits only
//! the table. Floats go to JSON in shortest round-trip form and to CSV with
//! 17 significant digits.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => float_json(*x),
            Cell::Text(s) => json!(s),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// 17 significant digits in scientific notation; `NaN`, `inf`, `-inf` otherwise.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Non-finite floats have no JSON form and become `null`.
pub fn float_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn complex_json(z: Complex64) -> Value {
    json!([float_json(z.re), float_json(z.im)])
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub params: Map<String, Value>,
    pub table: Table,
    /// Scalars placed next to `rows` inside `results`.
    pub summary: Map<String, Value>,
    pub audit: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, table: Table) -> Self {
        Self {
            command: command.to_string(),
            params: Map::new(),
            table,
            summary: Map::new(),
            audit: Map::new(),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .table
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut results = Map::new();
        results.insert("columns".into(), json!(self.table.columns));
        results.insert("rows".into(), Value::Array(rows));
        for (k, v) in &self.summary {
            results.insert(k.clone(), v.clone());
        }
        json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "params": self.params,
            "results": results,
            "audit": self.audit,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("values are serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.table.columns).expect("in-memory write");
        for row in &self.table.rows {
            w.write_record(row.iter().map(Cell::to_csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

/// Reads the `pmf` column back from a `state` report in JSON form.
pub fn pmf_from_json(text: &str) -> Result<Vec<f64>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::domain(format!("invalid JSON: {e}")))?;
    if v["schema"] != json!(SCHEMA_VERSION) {
        return Err(Error::domain(format!("unsupported schema {}", v["schema"])));
    }
    let rows = v["results"]["rows"]
        .as_array()
        .ok_or_else(|| Error::domain("results.rows is missing"))?;
    rows.iter()
        .map(|r| {
            r["pmf"]
                .as_f64()
                .ok_or_else(|| Error::domain("row without a numeric pmf"))
        })
        .collect()
}
