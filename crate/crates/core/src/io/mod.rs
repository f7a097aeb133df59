//! Workbook files, CSV tables and dumps.

mod dump;
mod file;
mod table;

pub use dump::{dump_formula_map, dump_spill_map, dump_values, lint_report, DumpError};
pub use file::{load_workbook, parse_workbook, render_literal, save_workbook, write_workbook, LoadError};
pub use table::{ingest_csv, read_csv, write_csv, Column, ColumnType, CsvError, TableData};
