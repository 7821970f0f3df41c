//! Rendering of command results as JSON, CSV or an aligned table.

use crate::config::Format;
use serde_json::{Map, Value};
use std::io::Write;

/// Metadata plus zero or more rows; a single-row report without metadata
/// prints as one flat JSON object.
#[derive(Debug, Default)]
pub struct Report {
    pub meta: Map<String, Value>,
    pub rows: Vec<Map<String, Value>>,
}

impl Report {
    pub fn single(row: Map<String, Value>) -> Self {
        Self { meta: Map::new(), rows: vec![row] }
    }

    pub fn render(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let v = self.to_json();
                serde_json::to_writer_pretty(&mut *out, &v)?;
                writeln!(out)
            }
            Format::Csv => self.csv(out),
            Format::Table => self.table(out),
        }
    }

    pub fn to_json(&self) -> Value {
        if self.rows.len() == 1 {
            let mut m = self.meta.clone();
            m.extend(self.rows[0].clone());
            Value::Object(m)
        } else {
            let mut m = self.meta.clone();
            m.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
            Value::Object(m)
        }
    }

    fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for row in &self.rows {
            for k in row.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
        cols
    }

    fn csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={}", scalar(v))?;
        }
        let cols = self.columns();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&cols)?;
        for row in &self.rows {
            w.write_record(cols.iter().map(|c| row.get(c).map(scalar).unwrap_or_default()))?;
        }
        w.flush()
    }

    fn table(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(out, "{k}: {}", scalar(v))?;
        }
        if self.rows.len() == 1 {
            let row = &self.rows[0];
            let width = row.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            for (k, v) in row {
                if !v.is_object() && !v.is_array() {
                    writeln!(out, "{k:<width$}  {}", scalar(v))?;
                }
            }
            return Ok(());
        }
        let cols: Vec<String> = self
            .columns()
            .into_iter()
            .filter(|c| self.rows.iter().all(|r| r.get(c).is_none_or(|v| !v.is_object() && !v.is_array())))
            .collect();
        let cells: Vec<Vec<String>> =
            self.rows.iter().map(|r| cols.iter().map(|c| r.get(c).map(scalar).unwrap_or_default()).collect()).collect();
        let widths: Vec<usize> = cols
            .iter()
            .enumerate()
            .map(|(j, c)| cells.iter().map(|r| r[j].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
            .collect();
        let line = |vals: &[String]| {
            vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(&cols))?;
        for r in &cells {
            writeln!(out, "{}", line(r))?;
        }
        Ok(())
    }
}

/// Numbers keep their shortest round-trip form; nested values print as compact JSON.
fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// JSON number, or null when not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}
