//! Result tables and their CSV / JSON renderings.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::Format;
use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Prepend a constant column, used by sweeps.
    pub fn with_leading(mut self, name: &str, value: &Value) -> Self {
        self.columns.insert(0, name.to_string());
        for r in &mut self.rows {
            r.insert(0, value.clone());
        }
        self
    }

    fn cell(v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }

    pub fn render(&self, command: &str, config: &Value, format: Format) -> String {
        let generated = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        match format {
            Format::Csv => {
                let mut s = format!(
                    "# sigma {VERSION}\n# command: {command}\n# config: {config}\n# generated: unix {generated}\n"
                );
                s.push_str(&self.columns.join(","));
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&r.iter().map(Self::cell).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let doc = json!({
                    "version": VERSION,
                    "command": command,
                    "config": config,
                    "generated": generated,
                    "columns": self.columns,
                    "rows": self.rows,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }
}

/// Finite floats as JSON numbers; NaN and infinities as null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn write_output(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_quotes() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![num(0.5), json!("x,y")]);
        t.push(vec![num(f64::NAN), json!(3)]);
        let s = t.render("ed", &json!({"k": 1}), Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], format!("# sigma {VERSION}"));
        assert_eq!(lines[2], "# config: {\"k\":1}");
        assert!(lines[3].starts_with("# generated: unix "));
        assert_eq!(&lines[4..], &["a,b", "0.5,\"x,y\"", ",3"]);
    }

    #[test]
    fn json_rows_parse_back() {
        let mut t = Table::new(&["t"]);
        t.push(vec![num(1.25)]);
        let v: Value = serde_json::from_str(&t.render("evolve", &json!({}), Format::Json)).unwrap();
        assert_eq!(v["rows"][0][0], json!(1.25));
        assert_eq!(v["columns"], json!(["t"]));
    }
}
