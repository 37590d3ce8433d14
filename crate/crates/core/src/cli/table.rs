//! CSV ingestion with per-column numeric inference.
//!
//! The dialect is deliberately rigid: a header row is required, the delimiter
//! is a comma, and every row must have the same arity. Cell text is kept
//! verbatim for echo-through; a column is parsed only when an expression
//! references it. Inference tries integers first and promotes the whole
//! column to float as soon as any cell needs it, so a column is never mixed.

use crate::error::{Error, Result};
use crate::value::Column;
use std::io::Read;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    /// Original cell text, row-major.
    pub cells: Vec<Vec<String>>,
}

impl Table {
    pub fn from_path(path: &Path) -> Result<Table> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Ingest(format!("cannot open {}: {e}", path.display())))?;
        Table::from_reader(file)
    }

    pub fn from_reader(reader: impl Read) -> Result<Table> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let headers = csv
            .headers()
            .map_err(|e| Error::Ingest(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut cells = Vec::new();
        for record in csv.records() {
            let record = record.map_err(|e| Error::Ingest(e.to_string()))?;
            cells.push(record.iter().map(str::to_string).collect());
        }
        Ok(Table { headers, cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Ingest(format!(
                "unknown column {name:?}; the table has {}",
                self.headers
                    .iter()
                    .map(|h| format!("{h:?}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })
    }

    /// Parse one column, integer unless any cell requires float. Cells are
    /// trimmed before parsing; non-finite spellings like `inf` are rejected
    /// because the engine only aggregates finite values.
    pub fn numeric_column(&self, name: &str) -> Result<Column> {
        let col = self.column_index(name)?;
        let mut ints = Vec::with_capacity(self.len());
        let mut all_int = true;
        for row in &self.cells {
            match row[col].trim().parse::<i64>() {
                Ok(v) if all_int => ints.push(v),
                _ => {
                    all_int = false;
                }
            }
        }
        if all_int {
            return Ok(Column::Int(ints));
        }
        let mut floats = Vec::with_capacity(self.len());
        for (i, row) in self.cells.iter().enumerate() {
            let cell = row[col].trim();
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => floats.push(v),
                _ => {
                    return Err(Error::Ingest(format!(
                        "column {name:?} row {}: {:?} is not a finite number",
                        i + 1,
                        row[col]
                    )))
                }
            }
        }
        Ok(Column::Float(floats))
    }
}
