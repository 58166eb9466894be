//! Versioned reports, JSON/CSV rendering and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub version: &'static str,
    pub threads: usize,
}

impl Environment {
    pub fn current() -> Environment {
        Environment { version: env!("CARGO_PKG_VERSION"), threads: rayon::current_num_threads() }
    }
}

/// Tabular part of a report, rendered as CSV rows.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub environment: Environment,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &str, data: Value) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            environment: Environment::current(),
            config: None,
            warnings: Vec::new(),
            data,
            table: None,
        }
    }

    pub fn with_config(mut self, config: impl Serialize) -> Report {
        self.config = Some(serde_json::to_value(config).expect("config serializes"));
        self
    }

    pub fn with_table(mut self, table: Table) -> Report {
        self.table = Some(table);
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self).expect("report serializes") + "\n"),
            Format::Csv => self.render_csv(),
        }
    }

    /// The table if there is one, otherwise `key,value` rows of the
    /// flattened data with dotted keys. Schema and command lead as comments.
    fn render_csv(&self) -> Result<String, CliError> {
        let mut out = format!("# schema_version={} command={}\n", self.schema_version, self.command);
        for w in &self.warnings {
            out.push_str(&format!("# warning: {w}\n"));
        }
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let (header, rows) = match &self.table {
            Some(t) => (t.header.clone(), t.rows.iter().map(|r| r.iter().map(cell).collect::<Vec<_>>()).collect()),
            None => {
                let mut flat = Vec::new();
                flatten("", &self.data, &mut flat);
                (vec!["key".to_string(), "value".to_string()], flat.into_iter().map(|(k, v)| vec![k, v]).collect::<Vec<_>>())
            }
        };
        wtr.write_record(&header).map_err(io_err)?;
        for r in rows {
            wtr.write_record(&r).map_err(io_err)?;
        }
        out.push_str(&String::from_utf8(wtr.into_inner().map_err(|e| CliError::Io(e.to_string()))?).expect("utf8"));
        Ok(out)
    }
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            out.push((prefix.to_string(), a.iter().map(cell).collect::<Vec<_>>().join(";")))
        }
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        other => out.push((prefix.to_string(), cell(other))),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    tmp.persist(path).map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Emits to stdout, or atomically to `path`.
pub fn emit(report: &Report, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = report.render(format)?;
    match path {
        Some(p) => write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<String, Value>>())
}

pub fn complex(z: bergman::Complex64) -> Value {
    json!([z.re, z.im])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_flattens_nested_data() {
        let r = Report::new("x", json!({"a": 1.5, "b": {"c": [1, 2]}, "d": "s"}));
        let text = r.render(Format::Csv).unwrap();
        assert!(text.starts_with("# schema_version=1 command=x\n"));
        assert!(text.contains("key,value\na,1.5\nb.c,1;2\nd,s\n"));
    }

    #[test]
    fn csv_prefers_the_table() {
        let t = Table { header: vec!["u".into(), "v".into()], rows: vec![vec![json!(1.0), json!(2.0)]] };
        let text = Report::new("x", json!({})).with_table(t).render(Format::Csv).unwrap();
        assert!(text.ends_with("u,v\n1.0,2.0\n"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
