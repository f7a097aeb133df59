use std::fmt;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::date::DateSerial;
use crate::engine::Content;
use crate::value::{parse_number, Scalar};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("row {row}: {source}")]
    Malformed { row: usize, source: csv::Error },
    #[error("missing header row")]
    NoHeader,
    #[error("header {column} is empty")]
    EmptyHeader { column: usize },
    #[error("duplicate header '{0}'")]
    DuplicateHeader(String),
    #[error("row {row} has {got} fields, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Number,
    Date,
    Boolean,
    Text,
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnType::Number => "number",
            ColumnType::Date => "date",
            ColumnType::Boolean => "boolean",
            ColumnType::Text => "text",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub kind: ColumnType,
    pub cells: Vec<Scalar>,
}

/// A CSV file read into typed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TableData {
    pub name: String,
    pub headers: Vec<String>,
    pub columns: Vec<Column>,
}

impl TableData {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.cells.len())
    }

    /// Grid content for each column; date columns carry the date format.
    pub fn contents(&self) -> Vec<Vec<Content>> {
        self.columns
            .iter()
            .map(|col| {
                col.cells
                    .iter()
                    .map(|cell| match (col.kind, cell) {
                        (ColumnType::Date, Scalar::Number(n)) => Content::date(*n as i64),
                        _ => Content::literal(cell.clone()),
                    })
                    .collect()
            })
            .collect()
    }
}

/// Reads a CSV file. The table takes the file stem as its name.
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<TableData, CsvError> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = std::fs::File::open(path)?;
    read_csv(&name, file)
}

pub fn read_csv(name: &str, input: impl Read) -> Result<TableData, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|source| CsvError::Malformed { row: 1, source })?,
        None => return Err(CsvError::NoHeader),
    };
    let mut headers: Vec<String> = Vec::with_capacity(header.len());
    for (i, h) in header.iter().enumerate() {
        let h = h.trim();
        if h.is_empty() {
            return Err(CsvError::EmptyHeader { column: i + 1 });
        }
        if headers.iter().any(|seen| seen.to_lowercase() == h.to_lowercase()) {
            return Err(CsvError::DuplicateHeader(h.to_string()));
        }
        headers.push(h.to_string());
    }
    let mut raw: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    for (i, record) in records.enumerate() {
        let row = i + 2;
        let record = record.map_err(|source| CsvError::Malformed { row, source })?;
        if record.len() != headers.len() {
            return Err(CsvError::Ragged {
                row,
                got: record.len(),
                expected: headers.len(),
            });
        }
        for (col, field) in raw.iter_mut().zip(record.iter()) {
            col.push(field.to_string());
        }
    }
    let columns = raw.into_iter().map(|fields| infer(&fields)).collect();
    Ok(TableData {
        name: name.to_string(),
        headers,
        columns,
    })
}

fn parse_bool(s: &str) -> Option<bool> {
    if s.eq_ignore_ascii_case("TRUE") {
        Some(true)
    } else if s.eq_ignore_ascii_case("FALSE") {
        Some(false)
    } else {
        None
    }
}

fn infer(fields: &[String]) -> Column {
    fn all<T>(fields: &[String], f: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
        if fields.is_empty() {
            return None;
        }
        fields.iter().map(|s| f(s.trim())).collect()
    }
    if let Some(xs) = all(fields, parse_number) {
        return Column {
            kind: ColumnType::Number,
            cells: xs.into_iter().map(Scalar::number).collect(),
        };
    }
    if let Some(ds) = all(fields, DateSerial::parse_iso) {
        return Column {
            kind: ColumnType::Date,
            cells: ds.into_iter().map(|d| Scalar::number(d.serial() as f64)).collect(),
        };
    }
    if let Some(bs) = all(fields, parse_bool) {
        return Column {
            kind: ColumnType::Boolean,
            cells: bs.into_iter().map(Scalar::Bool).collect(),
        };
    }
    Column {
        kind: ColumnType::Text,
        cells: fields.iter().map(|s| Scalar::text(s.as_str())).collect(),
    }
}

/// Writes typed columns back out as CSV. Dates print as `YYYY-MM-DD`.
pub fn write_csv(headers: &[String], columns: &[Column], out: impl std::io::Write) -> Result<(), CsvError> {
    let mut writer = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CsvError::Io(e.into());
    writer.write_record(headers).map_err(io)?;
    let rows = columns.first().map_or(0, |c| c.cells.len());
    for i in 0..rows {
        let record: Vec<String> = columns
            .iter()
            .map(|col| match (&col.cells[i], col.kind) {
                (Scalar::Number(n), ColumnType::Date) => DateSerial(*n as i64).to_string(),
                (cell, _) => cell.to_string(),
            })
            .collect();
        writer.write_record(&record).map_err(io)?;
    }
    writer.flush()?;
    Ok(())
}
