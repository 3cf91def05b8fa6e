use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Bool(bool),
}

/// Fixed 17-significant-digit scientific notation; non-finite values as
/// `inf`, `-inf`, `nan`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => Value::Number(
                format_float(*x)
                    .parse::<Number>()
                    .expect("formatted float is a valid JSON number"),
            ),
            Cell::Num(x) => Value::String(format_float(*x)),
            Cell::Int(n) => Value::from(*n as u64),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// A table with unit notes, written as CSV or JSON.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub command: &'static str,
    pub notes: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        for note in &self.notes {
            writeln!(out, "# {note}").expect("writing to memory");
        }
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text)).map_err(err)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }

    fn json(&self) -> Result<Vec<u8>, CliError> {
        let mut top = Map::new();
        top.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        top.insert("command".into(), Value::from(self.command));
        top.insert(
            "notes".into(),
            Value::Array(self.notes.iter().map(|n| Value::from(n.as_str())).collect()),
        );
        top.insert(
            "columns".into(),
            Value::Array(self.columns.iter().map(|c| Value::from(*c)).collect()),
        );
        top.insert(
            "rows".into(),
            Value::Array(
                self.rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect(),
            ),
        );
        let mut out = serde_json::to_vec_pretty(&Value::Object(top))
            .map_err(|e| CliError::Output(e.to_string()))?;
        out.push(b'\n');
        Ok(out)
    }
}
