//! Table emission: CSV with `#` metadata lines and a single header row,
//! or a JSON mirror carrying the same numbers. Floats render with 17
//! significant digits so every emitted value re-parses bit-identically.

use std::io::Write;
use std::path::Path;

use crate::{CliResult, Format};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => serde_json::json!(v),
            Cell::Int(v) => serde_json::json!(v),
            Cell::Text(s) => serde_json::json!(s),
        }
    }
}

/// 17 significant digits: the shortest fixed width that reproduces any
/// f64 exactly on re-parse.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn meta_f64(&mut self, key: &str, value: f64) {
        self.metadata.push((key.to_string(), fmt_f64(value)));
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k} = {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let metadata: serde_json::Map<String, serde_json::Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::json!(v)))
            .collect();
        serde_json::json!({
            "metadata": metadata,
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn write<W: Write>(&self, mut w: W, format: Format) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &self.to_json())?;
                writeln!(w)
            }
        }
    }
}

/// Writes to `--out` or stdout.
pub fn emit(table: &Table, out: Option<&Path>, format: Format) -> CliResult<()> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            table.write(std::io::BufWriter::new(file), format)?;
        }
        None => {
            let stdout = std::io::stdout();
            table.write(stdout.lock(), format)?;
        }
    }
    Ok(())
}
