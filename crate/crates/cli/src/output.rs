//! Tabular results and their CSV, JSON and OBJ encodings.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`. Missing values (absent envelope points) are empty CSV fields
//! and JSON `null`.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(&'static str),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => (*s).to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

/// Named columns and rows of cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Column names `prefix_1 .. prefix_n`.
pub fn indexed(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}_{i}")).collect()
}

/// Parameter column names `u1 .. un`.
pub fn param_columns(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("u{i}")).collect()
}

/// Identification written into JSON and OBJ headers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Metadata {
    pub version: String,
    pub config_hash: String,
    pub what: String,
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// CSV encoding with a header row.
pub fn to_csv(table: &Table) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).map_err(|e| CliError::Serialize(e.to_string()))?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))
            .map_err(|e| CliError::Serialize(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
}

/// JSON document `{metadata, rows}` with one object per row.
pub fn to_json(table: &Table, meta: &Metadata) -> Result<String, CliError> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: serde_json::Map<String, Value> =
                table.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
            Value::Object(obj)
        })
        .collect();
    let doc = json!({
        "metadata": {
            "version": meta.version,
            "config_hash": meta.config_hash,
            "what": meta.what,
            "columns": table.columns,
        },
        "rows": rows,
    });
    serde_json::to_string_pretty(&doc).map_err(|e| CliError::Serialize(e.to_string()))
}

pub fn write_csv(table: &Table, path: &Path) -> Result<(), CliError> {
    write_file(path, to_csv(table)?.as_bytes())
}

pub fn write_json(table: &Table, meta: &Metadata, path: &Path) -> Result<(), CliError> {
    write_file(path, to_json(table, meta)?.as_bytes())
}

/// A grid sample for mesh output: its point (if any) and whether it is smooth.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshVertex {
    pub point: Option<Vec<f64>>,
    pub smooth: bool,
}

/// Vertex and face counts of an OBJ document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ObjStats {
    pub vertices: usize,
    pub faces: usize,
    pub lines: usize,
}

/// OBJ encoding of a grid of samples with shape `shape` (last axis fastest).
///
/// Every present point becomes a vertex. On 2-parameter grids a quad is
/// emitted where all four corners are present and smooth; on 1-parameter
/// grids consecutive smooth vertices are joined by `l` records.
pub fn to_obj(shape: &[usize], samples: &[MeshVertex], meta: &Metadata, extra_header: &str) -> (String, ObjStats) {
    let mut out = format!(
        "# lorentz-flow {} {}\n# config {}\n",
        meta.version, meta.what, meta.config_hash
    );
    if !extra_header.is_empty() {
        out.push_str(&format!("# {extra_header}\n"));
    }
    let mut stats = ObjStats::default();
    let mut index = vec![None; samples.len()];
    for (i, s) in samples.iter().enumerate() {
        if let Some(p) = &s.point {
            stats.vertices += 1;
            index[i] = Some(stats.vertices);
            let mut xyz = p.clone();
            xyz.resize(3, 0.0);
            out.push_str(&format!("v {} {} {}\n", xyz[0], xyz[1], xyz[2]));
        }
    }
    let usable = |i: usize| if samples[i].smooth { index[i] } else { None };
    match shape {
        [n] => {
            for i in 1..*n {
                if let (Some(a), Some(b)) = (usable(i - 1), usable(i)) {
                    out.push_str(&format!("l {a} {b}\n"));
                    stats.lines += 1;
                }
            }
        }
        [rows, cols] => {
            for r in 1..*rows {
                for c in 1..*cols {
                    let corners = [
                        usable((r - 1) * cols + c - 1),
                        usable((r - 1) * cols + c),
                        usable(r * cols + c),
                        usable(r * cols + c - 1),
                    ];
                    if let [Some(a), Some(b), Some(c2), Some(d)] = corners {
                        out.push_str(&format!("f {a} {b} {c2} {d}\n"));
                        stats.faces += 1;
                    }
                }
            }
        }
        _ => {}
    }
    (out, stats)
}

pub fn write_obj(
    shape: &[usize],
    samples: &[MeshVertex],
    meta: &Metadata,
    extra_header: &str,
    path: &Path,
) -> Result<ObjStats, CliError> {
    let (text, stats) = to_obj(shape, samples, meta, extra_header);
    write_file(path, text.as_bytes())?;
    Ok(stats)
}
