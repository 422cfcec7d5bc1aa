use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde_json::{json, Value};

use casimir_core::{CertifiedValue, VERSION};

use crate::config::{Format, RunConfig, SCHEMA_VERSION};

/// Rows for the CSV rendering.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// What a command produced.
pub struct Artifact {
    pub result: Value,
    pub table: Table,
    /// Extra JSON lines after the envelope (sample dumps).
    pub stream: Vec<Value>,
    pub status: u8,
}

impl Artifact {
    pub fn new(result: Value, table: Table) -> Self {
        Self { result, table, stream: Vec::new(), status: 0 }
    }
}

pub fn cert(v: CertifiedValue) -> Value {
    json!({ "value": v.value, "error": v.error, "lower": v.lower(), "upper": v.upper() })
}

/// Round-trip decimal with `.` separator and exponent for very large or small magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn cert_cells(v: CertifiedValue) -> [String; 2] {
    [num(v.value), num(v.error)]
}

fn envelope(run: &RunConfig, result: &Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "version": VERSION,
        "config": run,
        "result": result,
    })
}

fn write_artifact<W: Write>(mut out: W, run: &RunConfig, a: &Artifact) -> io::Result<()> {
    match run.format {
        Format::Json => {
            if a.stream.is_empty() {
                serde_json::to_writer_pretty(&mut out, &envelope(run, &a.result))?;
                writeln!(out)?;
            } else {
                serde_json::to_writer(&mut out, &envelope(run, &a.result))?;
                writeln!(out)?;
                for line in &a.stream {
                    serde_json::to_writer(&mut out, line)?;
                    writeln!(out)?;
                }
            }
        }
        Format::Csv => {
            writeln!(out, "# schema_version={SCHEMA_VERSION}")?;
            writeln!(out, "# version={VERSION}")?;
            writeln!(out, "# config={}", serde_json::to_string(run)?)?;
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&a.table.header)?;
            for row in &a.table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    out.flush()
}

pub fn emit(run: &RunConfig, a: &Artifact) -> io::Result<()> {
    match &run.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            write_artifact(BufWriter::new(File::create(path)?), run, a)
        }
        None => write_artifact(io::stdout().lock(), run, a),
    }
}
