//! Reports: echoed config, the constants behind O(·) choices, results and an
//! optional table. JSON or CSV; the timestamp always sits in its own field
//! (JSON) or on its own final line (CSV) so the rest is byte-reproducible.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::Result;
use nongauss::numfmt::sig12;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub constants: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    pub timestamp: String,
}

impl Report {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Report {
            command: command.to_string(),
            config,
            constants: BTreeMap::new(),
            results: BTreeMap::new(),
            table: None,
            timestamp: String::new(),
        }
    }

    pub fn constant(&mut self, key: &str, v: impl Serialize) {
        self.constants.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn result(&mut self, key: &str, v: impl Serialize) {
        self.results.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> Result<()> {
        match format {
            Format::Json => self.write_json(out),
            Format::Csv => self.write_csv(out),
        }
    }

    fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut meta = Vec::new();
        flatten("config", &serde_json::to_value(&self.config)?, &mut meta);
        for (k, v) in &self.constants {
            flatten(&format!("constants.{k}"), v, &mut meta);
        }
        let tabular = self.table.is_some();
        if tabular {
            for (k, v) in &self.results {
                flatten(&format!("results.{k}"), v, &mut meta);
            }
        }
        writeln!(out, "# command={}", self.command)?;
        for (k, v) in &meta {
            writeln!(out, "# {k}={v}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            match &self.table {
                Some(t) => {
                    w.write_record(&t.columns)?;
                    for row in &t.rows {
                        w.write_record(row.iter().map(cell))?;
                    }
                }
                None => {
                    w.write_record(["key", "value"])?;
                    let mut rows = Vec::new();
                    for (k, v) in &self.results {
                        flatten(k, v, &mut rows);
                    }
                    for (k, v) in rows {
                        w.write_record([k, v])?;
                    }
                }
            }
            w.flush()?;
        }
        writeln!(out, "# timestamp={}", self.timestamp)?;
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => sig12(n.as_f64().expect("f64")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

/// Dotted keys for nested objects; arrays and scalars become single cells.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                flatten(&format!("{prefix}.{k}"), inner, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| x.is_number()) => {
            out.push((prefix.to_string(), items.iter().map(cell).collect::<Vec<_>>().join(" ")));
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut r = Report::new("faf", RunConfig::default());
        r.constant("batches", 37);
        r.result("faf1", 4.0);
        r.result("nested", json!({"a": 0.5, "b": [1.0, 2.0]}));
        r.timestamp = "T".into();
        r
    }

    #[test]
    fn csv_key_value_layout() {
        let mut buf = Vec::new();
        sample().write(&mut buf, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# constants.batches=37\n"));
        assert!(text.contains("faf1,4.00000000000\n"));
        assert!(text.contains("nested.b,1.00000000000 2.00000000000\n"));
        assert!(text.ends_with("# timestamp=T\n"));
    }

    #[test]
    fn json_has_timestamp_last() {
        let mut buf = Vec::new();
        sample().write(&mut buf, Format::Json).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let last_field = text.lines().rev().nth(1).unwrap();
        assert_eq!(last_field.trim(), r#""timestamp": "T""#);
    }
}
