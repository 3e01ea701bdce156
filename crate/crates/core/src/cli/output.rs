//! CSV and JSON emission. Numbers are written in scientific notation with
//! 17 significant digits so that equal inputs give byte-identical files.

use crate::error::{Error, Result};
use serde::ser::{Error as _, SerializeMap};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

/// Column-oriented table with `key = value` metadata.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.csv()),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => sci(*v),
                    Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> Result<String> {
        let rows: Vec<Row> = self.rows.iter().map(|cells| Row { columns: &self.columns, cells }).collect();
        let meta: BTreeMap<&str, &str> = self.metadata.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let doc = Document { metadata: meta, rows };
        let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Serialize)]
struct Document<'a> {
    metadata: BTreeMap<&'a str, &'a str>,
    rows: Vec<Row<'a>>,
}

/// One row as a JSON object with keys in column order.
struct Row<'a> {
    columns: &'a [String],
    cells: &'a [Cell],
}

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.columns.len()))?;
        for (name, cell) in self.columns.iter().zip(self.cells) {
            match cell {
                Cell::Num(x) if x.is_finite() => {
                    let raw = RawValue::from_string(sci(*x)).map_err(S::Error::custom)?;
                    map.serialize_entry(name, &raw)?;
                }
                Cell::Num(_) => map.serialize_entry(name, &())?,
                Cell::Text(t) => map.serialize_entry(name, t)?,
            }
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["x", "value", "err_estimate", "method"]);
        t.meta("alpha", 2);
        t.rows.push(vec![
            Cell::Num(0.0),
            Cell::Num(0.28209479177387814),
            Cell::Num(0.0009765625),
            Cell::Text("series".into()),
        ]);
        t
    }

    #[test]
    fn csv_layout() {
        let s = sample().render(Format::Csv).unwrap();
        assert_eq!(
            s,
            "# alpha = 2\nx,value,err_estimate,method\n\
             0.0000000000000000e0,2.8209479177387814e-1,9.7656250000000000e-4,series\n"
        );
    }

    #[test]
    fn json_keeps_digits_and_order() {
        let s = sample().render(Format::Json).unwrap();
        assert!(s.contains("\"value\": 2.8209479177387814e-1"), "{s}");
        let x = s.find("\"x\"").unwrap();
        let m = s.find("\"method\"").unwrap();
        assert!(x < m);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["rows"][0]["value"].as_f64(), Some(0.28209479177387814));
    }
}
