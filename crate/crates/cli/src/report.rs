use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

use crate::{CliError, Format};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub check: String,
    pub params: Map<String, Value>,
    pub deviation: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    pub fn at_most(check: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        let pass = deviation.is_finite() && deviation <= tolerance;
        Self { check: check.into(), params: Map::new(), deviation, tolerance, comparison: Comparison::AtMost, pass }
    }

    pub fn at_least(check: impl Into<String>, value: f64, threshold: f64) -> Self {
        let pass = value.is_finite() && value >= threshold;
        Self { check: check.into(), params: Map::new(), deviation: value, tolerance: threshold, comparison: Comparison::AtLeast, pass }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Rows keyed by a fixed column order; serialized as a list of records.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

struct Record<'a>(&'a [&'static str], &'a [Value]);

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for row in &self.rows {
            seq.serialize_element(&Record(&self.columns, row))?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: &'static str,
    pub params: Map<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    pub pass: bool,
    /// Names of failing checks; empty on success.
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, params: Map<String, Value>, checks: Vec<Check>, table: Option<Table>) -> Self {
        let failures: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.check.clone()).collect();
        Self { schema: SCHEMA, command, params, checks, table, pass: failures.is_empty(), failures }
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => self.render_csv(),
        }
    }

    /// The table when there is one, otherwise one row per check.
    fn render_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        match &self.table {
            Some(t) => {
                w.write_record(&t.columns).map_err(io)?;
                for row in &t.rows {
                    w.write_record(row.iter().map(cell)).map_err(io)?;
                }
            }
            None => {
                w.write_record(["check", "deviation", "tolerance", "comparison", "pass"]).map_err(io)?;
                for c in &self.checks {
                    let cmp = match c.comparison {
                        Comparison::AtMost => "<=",
                        Comparison::AtLeast => ">=",
                    };
                    w.write_record([c.check.clone(), cell(&num(c.deviation)), cell(&num(c.tolerance)), cmp.into(), c.pass.to_string()])
                        .map_err(io)?;
                }
            }
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "nan".into(),
        other => other.to_string(),
    }
}

/// Finite floats as JSON numbers, non-finite ones as `null`.
pub fn num(x: f64) -> Value {
    json!(x)
}

/// Writes `bytes` to `path` through a sibling temporary file and an atomic rename,
/// or to stdout when `path` is `None`.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match path {
        None => std::io::stdout().write_all(bytes).map_err(io),
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
            tmp.write_all(bytes).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            tmp.persist(p).map_err(|e| io(e.error))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut t = Table::new(&["n", "value"]);
        t.push(vec![json!(0), num(1.5)]);
        t.push(vec![json!(1), num(f64::NAN)]);
        Report::new(
            "demo",
            Map::new(),
            vec![Check::at_most("small", 1e-3, 1e-2), Check::at_least("growth", 3.0, 4.0)],
            Some(t),
        )
    }

    #[test]
    fn failures_are_listed() {
        let r = sample();
        assert!(!r.pass);
        assert_eq!(r.failures, vec!["growth".to_string()]);
        assert!(!Check::at_most("nan", f64::NAN, 1.0).pass);
    }

    #[test]
    fn json_keeps_column_order_and_schema() {
        let text = String::from_utf8(sample().render(Format::Json).unwrap()).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], json!(1));
        assert_eq!(v["table"][1]["value"], Value::Null);
        assert!(text.find("\"n\"").unwrap() < text.find("\"value\"").unwrap());
        assert_eq!(v["checks"][1]["comparison"], json!(">="));
    }

    #[test]
    fn csv_has_header() {
        let text = String::from_utf8(sample().render(Format::Csv).unwrap()).unwrap();
        assert_eq!(text, "n,value\n0,1.5\n1,nan\n");
    }

    #[test]
    fn atomic_write_replaces_target() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        emit(b"one", Some(&p)).unwrap();
        emit(b"two", Some(&p)).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
