use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::Format;

/// A result table with its metadata. Rows are JSON objects whose key order
/// is the column order.
pub struct Table {
    pub config: Value,
    pub summary: Option<Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Map<String, Value>>,
}

impl Table {
    pub fn new(config: impl Serialize) -> Result<Self> {
        Ok(Self {
            config: serde_json::to_value(config)?,
            summary: None,
            columns: Vec::new(),
            rows: Vec::new(),
        })
    }

    pub fn push(&mut self, row: Map<String, Value>) {
        for key in row.keys() {
            if !self.columns.contains(key) {
                self.columns.push(key.clone());
            }
        }
        self.rows.push(row);
    }

    pub fn push_serialized(&mut self, row: impl Serialize) -> Result<()> {
        match serde_json::to_value(row)? {
            Value::Object(m) => {
                self.push(m);
                Ok(())
            }
            other => anyhow::bail!("row is not a record: {other}"),
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut doc = Map::new();
                doc.insert("config".into(), self.config.clone());
                if let Some(s) = &self.summary {
                    doc.insert("summary".into(), s.clone());
                }
                doc.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
                Ok(serde_json::to_string_pretty(&Value::Object(doc))? + "\n")
            }
            Format::Csv => {
                let mut out = String::new();
                comment_lines(&mut out, &self.config);
                if let Some(s) = &self.summary {
                    comment_lines(&mut out, s);
                }
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(self.columns.iter().map(|c| cell(row.get(c))))?;
                }
                out.push_str(&String::from_utf8(w.into_inner()?)?);
                Ok(out)
            }
        }
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                io::stdout().lock().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

fn comment_lines(out: &mut String, v: &Value) {
    if let Value::Object(m) = v {
        for (key, value) in m {
            if value.is_null() {
                continue;
            }
            out.push_str(&format!("# {key}: {}\n", cell(Some(value))));
        }
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(a)) => a.iter().map(|x| cell(Some(x))).collect::<Vec<_>>().join(" "),
        Some(other) => other.to_string(),
    }
}
