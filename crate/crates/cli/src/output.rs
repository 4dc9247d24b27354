//! Report emission in JSON, CSV and text, plus run provenance.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

pub const OUT_DIR_ENV: &str = "SPERNER_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub argv: Vec<String>,
    pub seed: u64,
}

impl Provenance {
    pub fn new(seed: u64) -> Self {
        Provenance {
            version: env!("CARGO_PKG_VERSION"),
            argv: std::env::args().collect(),
            seed,
        }
    }

    pub fn header(&self) -> String {
        let argv = serde_json::to_string(&self.argv).expect("strings serialize");
        format!(
            "# sperner {} argv={} seed={}",
            self.version, argv, self.seed
        )
    }
}

/// Resolves a relative output path against `$SPERNER_OUT_DIR` when it is set.
pub fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// A report: one JSON object carrying the provenance, an optional table for
/// CSV/text rendering, and the scalar fields otherwise.
pub struct Report {
    pub body: Value,
    /// `(header, rows)` used for CSV and text instead of the flattened object.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl Report {
    pub fn new<T: Serialize>(provenance: &Provenance, body: &T) -> Self {
        let mut obj = Map::new();
        obj.insert(
            "provenance".into(),
            serde_json::to_value(provenance).expect("serializable"),
        );
        match serde_json::to_value(body).expect("serializable") {
            Value::Object(fields) => obj.extend(fields),
            other => {
                obj.insert("value".into(), other);
            }
        }
        Report {
            body: Value::Object(obj),
            table: None,
        }
    }

    pub fn with_table(mut self, header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some((header, rows));
        self
    }

    pub fn render(&self, format: Format) -> std::io::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.body)?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let (header, rows) = self.table_or_flat();
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&header)?;
                for row in rows {
                    w.write_record(&row)?;
                }
                w.into_inner().map_err(|e| e.into_error())
            }
            Format::Text => {
                let mut out = Vec::new();
                match &self.table {
                    Some((header, rows)) => {
                        writeln!(out, "{}", header.join(" "))?;
                        for row in rows {
                            writeln!(out, "{}", row.join(" "))?;
                        }
                    }
                    None => {
                        let (header, rows) = self.table_or_flat();
                        for (k, v) in header.iter().zip(&rows[0]) {
                            writeln!(out, "{k}: {v}")?;
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    fn table_or_flat(&self) -> (Vec<String>, Vec<Vec<String>>) {
        if let Some(t) = &self.table {
            return t.clone();
        }
        let Value::Object(obj) = &self.body else {
            unreachable!("reports are objects")
        };
        let fields: Vec<_> = obj.iter().filter(|(k, _)| *k != "provenance").collect();
        let header = fields.iter().map(|(k, _)| k.to_string()).collect();
        let row = fields.iter().map(|(_, v)| scalar(v)).collect();
        (header, vec![row])
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        _ => serde_json::to_string(v).expect("serializable"),
    }
}
