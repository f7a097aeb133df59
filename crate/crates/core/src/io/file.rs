//! The line-oriented workbook format.
//!
//! ```text
//! # comment
//! sheet Report
//! cell A1 value 42
//! cell B1 formula =A1*2
//! name total ref Report!B1
//! name twice formula =2*total
//! table Sales at Report!D1 from sales.csv
//! ```
//!
//! `cell` statements belong to the sheet declared most recently. Table paths
//! are relative to the workbook file.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::date::DateSerial;
use crate::engine::{parse_literal, CellKey, Content, NameBinding, NumberFormat, Workbook};
use crate::formula::{parse_formula, quote_sheet_name, render_formula, CellAddress};
use crate::value::Scalar;

use super::table::{ingest_csv, write_csv, Column, ColumnType};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadError {
    /// 1-based line of the offending statement, when there is one.
    pub line: Option<usize>,
    pub message: String,
}

impl LoadError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        LoadError {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for LoadError {}

pub fn load_workbook(path: impl AsRef<Path>) -> Result<Workbook, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| LoadError {
        line: None,
        message: format!("{}: {e}", path.display()),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut wb = parse_workbook(&text, base)?;
    wb.recalculate_full();
    Ok(wb)
}

enum Stmt<'a> {
    Cell { sheet: usize, addr: &'a str, content: Content },
    Name { name: &'a str, target: NameTarget<'a> },
    Table { name: &'a str, at: &'a str, path: &'a str },
}

enum NameTarget<'a> {
    Ref(&'a str),
    Formula(crate::formula::Expr),
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim_start()),
        None => (s, ""),
    }
}

fn formula(line: usize, text: &str) -> Result<crate::formula::Expr, LoadError> {
    parse_formula(text).map_err(|e| LoadError::at(line, format!("formula {text}: {e}")))
}

/// Builds a workbook from file text without recalculating it.
///
/// Sheets are created first, then cells, names and finally tables, so a
/// statement may mention a sheet declared further down.
pub fn parse_workbook(text: &str, base: &Path) -> Result<Workbook, LoadError> {
    let mut wb = Workbook::new();
    let mut stmts = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (kind, rest) = split_word(trimmed);
        match kind {
            "sheet" => {
                wb.add_sheet(rest).map_err(|e| LoadError::at(line, e.to_string()))?;
            }
            "cell" => {
                let sheet = wb
                    .sheets()
                    .len()
                    .checked_sub(1)
                    .ok_or_else(|| LoadError::at(line, "cell before any sheet"))?;
                let (addr, rest) = split_word(rest);
                let (how, body) = split_word(rest);
                let content = match how {
                    "value" if !body.is_empty() => parse_literal(body),
                    "formula" => Content::Formula(formula(line, body)?),
                    _ => return Err(LoadError::at(line, "expected `cell <A1> value <literal>` or `cell <A1> formula =<text>`")),
                };
                stmts.push((line, Stmt::Cell { sheet, addr, content }));
            }
            "name" => {
                let (name, rest) = split_word(rest);
                let (how, body) = split_word(rest);
                let target = match how {
                    "ref" if !body.is_empty() => NameTarget::Ref(body),
                    "formula" => NameTarget::Formula(formula(line, body)?),
                    _ => return Err(LoadError::at(line, "expected `name <ident> ref <Sheet>!<A1>` or `name <ident> formula =<text>`")),
                };
                stmts.push((line, Stmt::Name { name, target }));
            }
            "table" => {
                let (name, rest) = split_word(rest);
                let (at, rest) = split_word(rest);
                let (at_ref, rest) = split_word(rest);
                let (from, path) = split_word(rest);
                if at != "at" || from != "from" || path.is_empty() {
                    return Err(LoadError::at(line, "expected `table <Name> at <Sheet>!<A1> from <csv-path>`"));
                }
                stmts.push((line, Stmt::Table { name, at: at_ref, path }));
            }
            other => return Err(LoadError::at(line, format!("unknown statement `{other}`"))),
        }
    }

    let locate = |wb: &Workbook, line: usize, text: &str, sheet: Option<usize>| -> Result<CellKey, LoadError> {
        let bad = || LoadError::at(line, format!("bad cell reference `{text}`"));
        let addr = CellAddress::parse(text).ok_or_else(bad)?;
        match (&addr.sheet, sheet) {
            (Some(_), Some(_)) => Err(LoadError::at(line, format!("`{text}`: cell statements take a bare address"))),
            (None, None) => Err(LoadError::at(line, format!("`{text}` needs a sheet"))),
            (Some(name), None) => {
                let s = wb
                    .sheet_index(name)
                    .ok_or_else(|| LoadError::at(line, format!("unknown sheet '{name}'")))?;
                Ok(CellKey::new(s, addr.row, addr.col))
            }
            (None, Some(s)) => Ok(CellKey::new(s, addr.row, addr.col)),
        }
    };

    // cells first so that table placement can detect overlaps
    for (line, stmt) in &stmts {
        if let Stmt::Cell { sheet, addr, content } = stmt {
            let key = locate(&wb, *line, addr, Some(*sheet))?;
            if wb.content(key).is_some() {
                return Err(LoadError::at(*line, format!("duplicate cell {}", wb.display_key(key))));
            }
            wb.set_content(key, Some(content.clone()))
                .map_err(|e| LoadError::at(*line, e.to_string()))?;
        }
    }
    for (line, stmt) in &stmts {
        if let Stmt::Name { name, target } = stmt {
            let binding = match target {
                NameTarget::Ref(text) => NameBinding::Cell(locate(&wb, *line, text, None)?),
                NameTarget::Formula(expr) => NameBinding::Formula(expr.clone()),
            };
            wb.define_name(name, binding)
                .map_err(|e| LoadError::at(*line, e.to_string()))?;
        }
    }
    for (line, stmt) in &stmts {
        if let Stmt::Table { name, at, path } = stmt {
            let origin = locate(&wb, *line, at, None)?;
            let data = ingest_csv(base.join(path))
                .map_err(|e| LoadError::at(*line, format!("{path}: {e}")))?;
            wb.add_table(name, origin, data.headers.clone(), data.contents())
                .map_err(|e| LoadError::at(*line, e.to_string()))?;
        }
    }
    Ok(wb)
}

/// Text that [`parse_literal`] reads back as the same literal.
pub fn render_literal(value: &Scalar, format: NumberFormat) -> String {
    match (value, format) {
        (Scalar::Number(n), NumberFormat::Date) if n.fract() == 0.0 => DateSerial(*n as i64).to_string(),
        (Scalar::Text(t), _) => {
            let bare = parse_literal(t) == Content::literal(t.as_str()) && t.trim() == t && !t.is_empty();
            if bare {
                t.clone()
            } else {
                format!("\"{}\"", t.replace('"', "\"\""))
            }
        }
        _ => value.to_string(),
    }
}

/// Serializes a workbook. Table data is not included: each table statement
/// names `<table>.csv`, which [`save_workbook`] writes alongside.
pub fn write_workbook(wb: &Workbook) -> String {
    let mut out = String::new();
    let in_table = |key: CellKey| {
        wb.tables()
            .iter()
            .any(|t| t.rect().contains(key))
    };
    for (s, sheet) in wb.sheets().iter().enumerate() {
        out.push_str(&format!("sheet {}\n", sheet.name));
        for ((r, c), content) in sheet.cells() {
            let key = CellKey::new(s, r, c);
            if in_table(key) && !content.is_formula() {
                continue;
            }
            let body = match content {
                Content::Literal { value, format } => format!("value {}", render_literal(value, *format)),
                Content::Formula(e) => format!("formula ={}", render_formula(e)),
            };
            out.push_str(&format!("cell {} {body}\n", key.a1()));
        }
    }
    for def in wb.names() {
        match &def.binding {
            NameBinding::Cell(k) => out.push_str(&format!("name {} ref {}\n", def.name, wb.display_key(*k))),
            NameBinding::Formula(e) => out.push_str(&format!("name {} formula ={}\n", def.name, render_formula(e))),
        }
    }
    for t in wb.tables() {
        let at = format!("{}!{}", quote_sheet_name(&wb.sheets()[t.sheet].name), CellKey::new(t.sheet, t.top, t.left).a1());
        out.push_str(&format!("table {} at {at} from {}.csv\n", t.name, t.name));
    }
    out
}

/// Writes the workbook file and one CSV per table next to it.
pub fn save_workbook(wb: &Workbook, path: impl AsRef<Path>) -> std::io::Result<()> {
    let path = path.as_ref();
    let dir: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
    for t in wb.tables() {
        let columns: Vec<Column> = (0..t.headers.len())
            .map(|j| {
                let keys = (0..t.rows).map(|i| CellKey::new(t.sheet, t.top + 1 + i as u32, t.left + j as u32));
                let mut date = t.rows > 0;
                let cells = keys
                    .map(|k| match wb.content(k) {
                        Some(Content::Literal { value, format }) => {
                            date &= *format == NumberFormat::Date;
                            value.clone()
                        }
                        _ => {
                            date = false;
                            Scalar::empty()
                        }
                    })
                    .collect();
                let kind = if date { ColumnType::Date } else { ColumnType::Text };
                Column { kind, cells }
            })
            .collect();
        let file = std::fs::File::create(dir.join(format!("{}.csv", t.name)))?;
        write_csv(&t.headers, &columns, file).map_err(|e| std::io::Error::other(e.to_string()))?;
    }
    std::fs::write(path, write_workbook(wb))
}
