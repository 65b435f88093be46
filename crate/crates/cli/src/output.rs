//! Tabular output. Numbers are written as `{:.14e}` in CSV, and JSON carries
//! the same rounded values so both formats decode to identical `f64`s.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::FormatArg;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        format!("{:.14e}", 0.0)
    } else if v.is_finite() {
        format!("{v:.14e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => format_number(*v),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Num(v) if v.is_finite() => {
                let rounded: f64 = format_number(*v).parse().unwrap_or(*v);
                json!(rounded)
            }
            Cell::Num(v) => Value::String(format_number(*v)),
            Cell::Empty => Value::Null,
        }
    }
}

/// A table plus metadata that only the JSON form carries (error estimates,
/// parameters).
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Map<String, Value>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new(), meta: Map::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: Value) {
        self.meta.insert(key.to_string(), value);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("columns".into(), json!(self.columns));
        doc.insert("rows".into(), Value::Array(rows));
        for (k, v) in &self.meta {
            doc.insert(k.clone(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).unwrap_or_default();
        s.push('\n');
        s
    }

    pub fn render(&self, format: FormatArg) -> String {
        match format {
            FormatArg::Csv => self.to_csv(),
            FormatArg::Json => self.to_json(),
        }
    }

    pub fn write(&self, format: FormatArg, out: Option<&Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_scientific_format() {
        assert_eq!(format_number(0.5), "5.00000000000000e-1");
        assert_eq!(format_number(-1234.5), "-1.23450000000000e3");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn csv_and_json_carry_the_same_numbers() {
        let mut t = Table::new(vec!["quantity", "value"]);
        t.push(vec!["a".into(), (1.0 / 3.0).into()]);
        t.push(vec!["b".into(), Cell::Empty]);
        assert_eq!(t.to_csv(), "quantity,value\na,3.33333333333333e-1\nb,\n");
        let doc: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(doc["rows"][0]["value"].as_f64().unwrap(), "3.33333333333333e-1".parse::<f64>().unwrap());
        assert!(doc["rows"][1]["value"].is_null());
    }
}
