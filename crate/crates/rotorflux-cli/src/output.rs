//! CSV and JSON emission. All floating-point values are printed with nine
//! significant digits; a fixed seed therefore yields byte-identical output.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::CliError;

/// Nine significant digits, exponent form.
pub fn fmt(v: f64) -> String {
    format!("{v:.8e}")
}

/// A float that may be missing (bond columns on the last site row, standard
/// errors of single-trajectory runs).
pub fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => fmt(x),
        _ => String::new(),
    }
}

pub fn json_opt(v: Option<f64>) -> Value {
    match v {
        Some(x) if x.is_finite() => json!(x),
        _ => Value::Null,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A table with fixed named columns, rendered as CSV or a JSON array of
/// objects keyed by the same names.
pub struct Table {
    columns: Vec<&'static str>,
    csv_rows: Vec<Vec<String>>,
    json_rows: Vec<Value>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            csv_rows: Vec::new(),
            json_rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<String>, values: Vec<Value>) {
        assert_eq!(cells.len(), self.columns.len());
        assert_eq!(values.len(), self.columns.len());
        self.csv_rows.push(cells);
        let obj = self
            .columns
            .iter()
            .zip(values)
            .map(|(k, v)| ((*k).to_string(), v))
            .collect::<serde_json::Map<_, _>>();
        self.json_rows.push(Value::Object(obj));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.csv_rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut out =
                    serde_json::to_string_pretty(&Value::Array(self.json_rows.clone()))
                        .expect("rows are valid JSON");
                out.push('\n');
                out
            }
        }
    }
}

/// Writes to the given path, or to stdout when none is given.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        None => {
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| CliError::io(format!("writing stdout: {e}")))?;
        }
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))?;
        }
    }
    Ok(())
}

/// Run-metadata record: `key = value` lines. Written next to the output file
/// (with a `.meta` suffix) or to stderr when the table goes to stdout.
pub fn emit_metadata(out: Option<&Path>, lines: &[(String, String)]) -> Result<(), CliError> {
    let mut text = String::new();
    for (k, v) in lines {
        text.push_str(&format!("{k} = {v}\n"));
    }
    match out {
        None => {
            eprint!("{text}");
            Ok(())
        }
        Some(path) => {
            let mut meta = path.as_os_str().to_owned();
            meta.push(".meta");
            std::fs::write(&meta, text)
                .map_err(|e| CliError::io(format!("writing metadata: {e}")))
        }
    }
}
