use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::eval::Evaluator;
use super::recalc::State;
use super::spill::SpillState;
use super::{CalcReport, CellKey, Content, NodeKey, NumberFormat, Rect};
use crate::date::DateSerial;
use crate::formula::{
    parse_a1, parse_formula, quote_sheet_name, CellAddress, Expr, MAX_COLS, MAX_ROWS,
};
use crate::functions::GridInfo;
use crate::value::{parse_number, ErrorKind, ErrorValue, Scalar, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("unknown sheet '{0}'")]
    UnknownSheet(String),
    #[error("duplicate sheet '{0}'")]
    DuplicateSheet(String),
    #[error("invalid sheet name '{0}'")]
    InvalidSheetName(String),
    #[error("duplicate name '{0}'")]
    DuplicateName(String),
    #[error("invalid name '{0}'")]
    InvalidName(String),
    #[error("duplicate table '{0}'")]
    DuplicateTable(String),
    #[error("unknown table '{0}'")]
    UnknownTable(String),
    #[error("cell {0} is outside the sheet")]
    OutOfBounds(String),
    #[error("table '{table}' overlaps {cell}")]
    Overlap { table: String, cell: String },
    #[error("table '{table}' expects {expected} values, got {got}")]
    RowWidth {
        table: String,
        expected: usize,
        got: usize,
    },
}

pub struct Sheet {
    pub name: String,
    /// `(row, col)` to slot.
    rows: BTreeMap<(u32, u32), usize>,
    /// `(col, row)` to slot, for scanning tall rectangles.
    cols: BTreeMap<(u32, u32), usize>,
    slots: Vec<((u32, u32), Content)>,
}

impl Sheet {
    fn new(name: &str) -> Sheet {
        Sheet {
            name: name.to_string(),
            rows: BTreeMap::new(),
            cols: BTreeMap::new(),
            slots: Vec::new(),
        }
    }

    pub fn get(&self, row: u32, col: u32) -> Option<&Content> {
        self.rows.get(&(row, col)).map(|&i| &self.slots[i].1)
    }

    /// Non-empty cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = ((u32, u32), &Content)> {
        self.rows.iter().map(|(k, &i)| (*k, &self.slots[i].1))
    }

    fn set(&mut self, row: u32, col: u32, content: Option<Content>) {
        match (self.rows.get(&(row, col)).copied(), content) {
            (Some(i), Some(c)) => self.slots[i].1 = c,
            (None, Some(c)) => {
                self.rows.insert((row, col), self.slots.len());
                self.cols.insert((col, row), self.slots.len());
                self.slots.push(((row, col), c));
            }
            (Some(i), None) => {
                self.rows.remove(&(row, col));
                self.cols.remove(&(col, row));
                self.slots.swap_remove(i);
                if let Some(&((r, c), _)) = self.slots.get(i) {
                    self.rows.insert((r, c), i);
                    self.cols.insert((c, r), i);
                }
            }
            (None, None) => {}
        }
    }

    /// Non-empty cells inside `rect`, in row-major order.
    pub(crate) fn cells_in<'a>(&'a self, rect: &Rect) -> Box<dyn Iterator<Item = ((u32, u32), &'a Content)> + 'a> {
        let (top, bottom, left, right) = (rect.top, rect.bottom, rect.left, rect.right);
        let slot = move |&i: &usize| {
            let (k, content) = &self.slots[i];
            (*k, content)
        };
        if rect.height() <= rect.width() {
            return Box::new((top..=bottom).flat_map(move |r| self.rows.range((r, left)..=(r, right)).map(move |(_, i)| slot(i))));
        }
        let mut found: Vec<_> = (left..=right)
            .flat_map(|c| self.cols.range((c, top)..=(c, bottom)).map(|(_, i)| slot(i)))
            .collect();
        if left != right {
            found.sort_unstable_by_key(|(k, _)| *k);
        }
        Box::new(found.into_iter())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NameBinding {
    Cell(CellKey),
    Formula(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NameDef {
    pub name: String,
    pub binding: NameBinding,
}

/// A structured table: one header row followed by `rows` data rows, all
/// stored as ordinary literal cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub sheet: usize,
    /// Header row.
    pub top: u32,
    pub left: u32,
    pub headers: Vec<String>,
    pub rows: usize,
}

impl Table {
    pub fn column_index(&self, column: &str) -> Option<usize> {
        self.headers
            .iter()
            .position(|h| h.to_lowercase() == column.to_lowercase())
    }

    /// Data cells of one column; `None` when the table has no rows.
    pub fn column_rect(&self, index: usize) -> Option<Rect> {
        (self.rows > 0).then(|| Rect {
            sheet: self.sheet,
            top: self.top + 1,
            left: self.left + index as u32,
            bottom: self.top + self.rows as u32,
            right: self.left + index as u32,
        })
    }

    /// Header plus data rows.
    pub fn rect(&self) -> Rect {
        Rect {
            sheet: self.sheet,
            top: self.top,
            left: self.left,
            bottom: self.top + self.rows as u32,
            right: self.left + self.headers.len() as u32 - 1,
        }
    }
}

/// Precedents and dependents of one cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub precedents: Vec<Rect>,
    pub precedent_names: Vec<String>,
    pub dependents: Vec<CellKey>,
    pub dependent_names: Vec<String>,
}

/// Sheets, defined names and tables, plus the state of the last
/// recalculation.
#[derive(Default)]
pub struct Workbook {
    pub(super) sheets: Vec<Sheet>,
    pub(super) names: Vec<NameDef>,
    pub(super) tables: Vec<Table>,
    pub(super) state: State,
}

fn same_name(a: &str, b: &str) -> bool {
    a.to_lowercase() == b.to_lowercase()
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_alphabetic() || first == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '.')
        && parse_a1(name).is_none()
        && !same_name(name, "TRUE")
        && !same_name(name, "FALSE")
}

/// Parses a literal as typed into a cell: `TRUE`/`FALSE`, an error such as
/// `#N/A`, an ISO date, a number, `"quoted text"` or bare text.
pub fn parse_literal(text: &str) -> Content {
    let t = text.trim();
    if t.eq_ignore_ascii_case("TRUE") || t.eq_ignore_ascii_case("FALSE") {
        return Content::literal(t.eq_ignore_ascii_case("TRUE"));
    }
    if let Some(kind) = ErrorKind::parse(t) {
        return Content::literal(Scalar::error(kind));
    }
    if let Some(d) = DateSerial::parse_iso(t) {
        return Content::date(d.serial());
    }
    if let Some(n) = parse_number(t) {
        return Content::literal(n);
    }
    if let Some(inner) = t.strip_prefix('"').and_then(|s| s.strip_suffix('"')) {
        if inner.len() + 2 == t.len() && !inner.replace("\"\"", "").contains('"') {
            return Content::literal(Scalar::text(inner.replace("\"\"", "\"")));
        }
    }
    Content::literal(Scalar::text(t))
}

impl Workbook {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    pub fn names(&self) -> &[NameDef] {
        &self.names
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn add_sheet(&mut self, name: &str) -> Result<usize, EditError> {
        let name = name.trim();
        if name.is_empty() || name.contains(['!', '\'', '[', ']']) {
            return Err(EditError::InvalidSheetName(name.to_string()));
        }
        if self.sheet_index(name).is_some() {
            return Err(EditError::DuplicateSheet(name.to_string()));
        }
        self.sheets.push(Sheet::new(name));
        Ok(self.sheets.len() - 1)
    }

    pub fn sheet_index(&self, name: &str) -> Option<usize> {
        self.sheets.iter().position(|s| same_name(&s.name, name))
    }

    pub fn name_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| same_name(&n.name, name))
    }

    pub fn table_index(&self, name: &str) -> Option<usize> {
        self.tables.iter().position(|t| same_name(&t.name, name))
    }

    /// Resolves an address against the sheet a formula lives on.
    pub fn resolve(&self, addr: &CellAddress, context: usize) -> Option<CellKey> {
        let sheet = match &addr.sheet {
            Some(name) => self.sheet_index(name)?,
            None => context,
        };
        Some(CellKey::new(sheet, addr.row, addr.col))
    }

    /// Parses `Sheet!A1` or `A1`; a bare address refers to the first sheet.
    pub fn parse_cell_ref(&self, text: &str) -> Option<CellKey> {
        let addr = CellAddress::parse(text.trim())?;
        if self.sheets.is_empty() {
            return None;
        }
        self.resolve(&addr, 0)
    }

    /// `Sheet1!J8`, quoting the sheet name when needed.
    pub fn display_key(&self, key: CellKey) -> String {
        format!("{}!{}", quote_sheet_name(&self.sheets[key.sheet].name), key.a1())
    }

    pub fn display_rect(&self, rect: &Rect) -> String {
        format!("{}!{}", quote_sheet_name(&self.sheets[rect.sheet].name), rect.a1())
    }

    pub fn content(&self, key: CellKey) -> Option<&Content> {
        self.sheets.get(key.sheet)?.get(key.row, key.col)
    }

    fn check_key(&self, key: CellKey) -> Result<(), EditError> {
        if key.sheet >= self.sheets.len() {
            return Err(EditError::UnknownSheet(format!("#{}", key.sheet)));
        }
        if !(1..=MAX_ROWS).contains(&key.row) || !(1..=MAX_COLS).contains(&key.col) {
            return Err(EditError::OutOfBounds(format!("R{}C{}", key.row, key.col)));
        }
        Ok(())
    }

    /// Stores content without recalculating.
    pub fn set_content(&mut self, key: CellKey, content: Option<Content>) -> Result<(), EditError> {
        self.check_key(key)?;
        self.sheets[key.sheet].set(key.row, key.col, content);
        Ok(())
    }

    pub fn define_name(&mut self, name: &str, binding: NameBinding) -> Result<(), EditError> {
        if !valid_identifier(name) {
            return Err(EditError::InvalidName(name.to_string()));
        }
        if self.name_index(name).is_some() {
            return Err(EditError::DuplicateName(name.to_string()));
        }
        if let NameBinding::Cell(key) = binding {
            self.check_key(key)?;
        }
        self.names.push(NameDef {
            name: name.to_string(),
            binding,
        });
        Ok(())
    }

    /// Places a table with its header row at `origin`. Every cell it covers
    /// must be empty.
    pub fn add_table(
        &mut self,
        name: &str,
        origin: CellKey,
        headers: Vec<String>,
        columns: Vec<Vec<Content>>,
    ) -> Result<(), EditError> {
        if !valid_identifier(name) {
            return Err(EditError::InvalidName(name.to_string()));
        }
        if self.table_index(name).is_some() {
            return Err(EditError::DuplicateTable(name.to_string()));
        }
        assert_eq!(headers.len(), columns.len(), "one column per header");
        let rows = columns.first().map_or(0, Vec::len);
        let table = Table {
            name: name.to_string(),
            sheet: origin.sheet,
            top: origin.row,
            left: origin.col,
            headers,
            rows,
        };
        let rect = table.rect();
        self.check_key(origin)?;
        self.check_key(CellKey::new(rect.sheet, rect.bottom, rect.right))?;
        if let Some(((r, c), _)) = self.sheets[rect.sheet].cells_in(&rect).next() {
            return Err(EditError::Overlap {
                table: name.to_string(),
                cell: CellKey::new(rect.sheet, r, c).a1(),
            });
        }
        for (j, header) in table.headers.iter().enumerate() {
            let key = CellKey::new(rect.sheet, rect.top, rect.left + j as u32);
            self.set_content(key, Some(Content::literal(header.as_str())))?;
        }
        for (j, column) in columns.into_iter().enumerate() {
            for (i, cell) in column.into_iter().enumerate() {
                let key = CellKey::new(rect.sheet, rect.top + 1 + i as u32, rect.left + j as u32);
                self.set_content(key, Some(cell))?;
            }
        }
        self.tables.push(table);
        Ok(())
    }

    /// Number of formula cells plus formula-bound names.
    pub fn formula_count(&self) -> usize {
        let cells: usize = self
            .sheets
            .iter()
            .map(|s| s.slots.iter().map(|(_, c)| c).filter(|c| c.is_formula()).count())
            .sum();
        let names = self
            .names
            .iter()
            .filter(|n| matches!(n.binding, NameBinding::Formula(_)))
            .count();
        cells + names
    }

    /// Formula cells in (sheet, row, col) order.
    pub fn formula_cells(&self) -> Vec<CellKey> {
        self.sheets
            .iter()
            .enumerate()
            .flat_map(|(s, sheet)| {
                let mut keys: Vec<CellKey> = sheet
                    .slots
                    .iter()
                    .filter(|(_, c)| c.is_formula())
                    .map(|((r, c), _)| CellKey::new(s, *r, *c))
                    .collect();
                keys.sort_unstable();
                keys
            })
            .collect()
    }

    /// Replaces one cell from user input and recalculates incrementally.
    ///
    /// Input starting with `=` is a formula; a formula that fails to parse
    /// is kept as text and reported in the diagnostics. Empty input clears
    /// the cell.
    pub fn apply_edit(&mut self, key: CellKey, input: &str) -> Result<CalcReport, EditError> {
        self.check_key(key)?;
        let mut diagnostics = Vec::new();
        let content = if input.trim().is_empty() {
            None
        } else if input.trim_start().starts_with('=') {
            match parse_formula(input.trim()) {
                Ok(expr) => Some(Content::Formula(expr)),
                Err(e) => {
                    diagnostics.push(format!("{}: {e}", self.display_key(key)));
                    Some(Content::literal(Scalar::text(input.trim())))
                }
            }
        } else {
            Some(parse_literal(input))
        };
        let mut report = self.set_cell(key, content)?;
        report.diagnostics.extend(diagnostics);
        Ok(report)
    }

    /// Replaces one cell's content and recalculates incrementally.
    pub fn set_cell(&mut self, key: CellKey, content: Option<Content>) -> Result<CalcReport, EditError> {
        self.set_content(key, content)?;
        Ok(self.recalculate_after(&[key], None))
    }

    /// Appends a data row to a table and recalculates incrementally.
    pub fn append_table_row(&mut self, table: &str, row: Vec<Scalar>) -> Result<CalcReport, EditError> {
        let t = self
            .table_index(table)
            .ok_or_else(|| EditError::UnknownTable(table.to_string()))?;
        let info = self.tables[t].clone();
        if row.len() != info.headers.len() {
            return Err(EditError::RowWidth {
                table: info.name,
                expected: info.headers.len(),
                got: row.len(),
            });
        }
        let r = info.top + info.rows as u32 + 1;
        let keys: Vec<CellKey> = (0..row.len())
            .map(|j| CellKey::new(info.sheet, r, info.left + j as u32))
            .collect();
        for &key in &keys {
            self.check_key(key)?;
            if self.content(key).is_some() {
                return Err(EditError::Overlap {
                    table: info.name,
                    cell: key.a1(),
                });
            }
        }
        for (&key, value) in keys.iter().zip(row) {
            let format = match self.content(CellKey::new(key.sheet, r - 1, key.col)) {
                Some(Content::Literal { format, .. }) if info.rows > 0 => *format,
                _ => NumberFormat::General,
            };
            self.set_content(key, Some(Content::Literal { value, format }))?;
        }
        self.tables[t].rows += 1;
        Ok(self.recalculate_after(&keys, Some(t)))
    }

    /// The value a cell shows after the last recalculation.
    pub fn value_at(&self, key: CellKey) -> Scalar {
        self.evaluator().read_cell(key)
    }

    /// The full result of a formula cell, before spilling.
    pub fn formula_result(&self, key: CellKey) -> Option<&Value> {
        self.state.values.get(&NodeKey::Cell(key))
    }

    /// Value of a formula-bound name.
    pub fn name_value(&self, name: &str) -> Option<&Value> {
        self.state.values.get(&NodeKey::Name(self.name_index(name)?))
    }

    /// Evaluates a formula against the current state without storing it.
    pub fn evaluate(&self, sheet: usize, formula: &str) -> Result<Value, crate::formula::ParseError> {
        let expr = parse_formula(formula)?;
        Ok(self.evaluator().eval(&expr, sheet))
    }

    pub fn spill_state(&self, key: CellKey) -> Option<&SpillState> {
        self.state.placement.state(key)
    }

    /// Rectangle a formula cell occupies: its spill extent, or the anchor
    /// alone when blocked.
    pub fn spill_extent(&self, key: CellKey) -> Option<Rect> {
        let (rows, cols) = self.spill_state(key)?.extent();
        Some(Rect::sized(key, rows, cols))
    }

    /// Anchor whose spill covers `key`, if any.
    pub fn covering_anchor(&self, key: CellKey) -> Option<CellKey> {
        self.state.placement.covering(key)
    }

    /// Every spill state in (sheet, row, col) order.
    pub fn spill_states(&self) -> impl Iterator<Item = (CellKey, &SpillState)> {
        self.state.placement.states()
    }

    /// Bounding box, from `A1`, of the sheet's content and spill extents.
    pub fn used_extent(&self, sheet: usize) -> Option<(u32, u32)> {
        let mut extent: Option<(u32, u32)> = None;
        let mut grow = |r: u32, c: u32| {
            let (er, ec) = extent.unwrap_or((0, 0));
            extent = Some((er.max(r), ec.max(c)));
        };
        for ((r, c), _) in self.sheets[sheet].cells() {
            grow(r, c);
        }
        for (key, state) in self.spill_states() {
            if key.sheet == sheet {
                let (rows, cols) = state.extent();
                grow(key.row + rows as u32 - 1, key.col + cols as u32 - 1);
            }
        }
        extent
    }

    /// Cells showing an error, in (sheet, row, col) order.
    pub fn error_cells(&self) -> Vec<(CellKey, ErrorValue)> {
        let mut out = BTreeMap::new();
        let eval = self.evaluator();
        for (s, sheet) in self.sheets.iter().enumerate() {
            for ((r, c), content) in sheet.cells() {
                let key = CellKey::new(s, r, c);
                let shown = match content {
                    Content::Literal { value, .. } => value.as_error().cloned(),
                    Content::Formula(_) => eval.read_cell(key).as_error().cloned(),
                };
                if let Some(e) = shown {
                    out.insert(key, e);
                }
            }
        }
        for (anchor, state) in self.spill_states() {
            let (rows, cols) = state.extent();
            for key in Rect::sized(anchor, rows, cols).cells().skip(1) {
                if let Scalar::Error(e) = eval.read_cell(key) {
                    out.insert(key, e);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Precedents of the formula at `key` (ranges expanded, spill references
    /// resolved to their current extents) and the formulas that read `key`.
    pub fn trace(&self, key: CellKey) -> Trace {
        let mut trace = Trace::default();
        if let Some(Content::Formula(expr)) = self.content(key) {
            let (rects, names) = self.precedents_of(expr, key.sheet);
            trace.precedents = rects;
            trace.precedent_names = names;
        }
        for anchor in self.formula_cells() {
            if let Some(Content::Formula(expr)) = self.content(anchor) {
                let (rects, _) = self.precedents_of(expr, anchor.sheet);
                if rects.iter().any(|r| r.contains(key)) {
                    trace.dependents.push(anchor);
                }
            }
        }
        for def in &self.names {
            if let NameBinding::Formula(expr) = &def.binding {
                let (rects, _) = self.precedents_of(expr, 0);
                if rects.iter().any(|r| r.contains(key)) {
                    trace.dependent_names.push(def.name.clone());
                }
            }
        }
        trace.dependent_names.sort();
        trace
    }

    fn precedents_of(&self, expr: &Expr, context: usize) -> (Vec<Rect>, Vec<String>) {
        let mut rects = Vec::new();
        let mut names = Vec::new();
        let spill_rect = |key: CellKey| self.spill_extent(key).unwrap_or(Rect::cell(key));
        expr.walk(&mut |e| match e {
            Expr::Cell(a) => rects.extend(self.resolve(a, context).map(Rect::cell)),
            Expr::Range(a, b) => rects.extend(self.range_rect(a, b, context)),
            Expr::Spill(crate::formula::SpillTarget::Cell(a)) => {
                rects.extend(self.resolve(a, context).map(spill_rect))
            }
            Expr::Spill(crate::formula::SpillTarget::Name(n)) | Expr::Name(n) => {
                match self.name_index(n).map(|i| &self.names[i].binding) {
                    Some(NameBinding::Cell(k)) if matches!(e, Expr::Spill(_)) => rects.push(spill_rect(*k)),
                    Some(NameBinding::Cell(k)) => rects.push(Rect::cell(*k)),
                    Some(NameBinding::Formula(_)) => names.push(n.clone()),
                    None => {}
                }
            }
            Expr::TableColumn { table, column } => {
                rects.extend(self.table_column(table, column).ok().flatten())
            }
            _ => {}
        });
        rects.sort();
        rects.dedup();
        names.sort();
        names.dedup();
        (rects, names)
    }

    pub(super) fn range_rect(&self, a: &CellAddress, b: &CellAddress, context: usize) -> Option<Rect> {
        let start = self.resolve(a, context)?;
        let end = match &b.sheet {
            Some(_) => self.resolve(b, context)?,
            None => CellKey::new(start.sheet, b.row, b.col),
        };
        (start.sheet == end.sheet).then(|| Rect::spanning(start, end))
    }

    /// Data rectangle of `Table[column]`; `Ok(None)` for a table without
    /// rows.
    pub(super) fn table_column(&self, table: &str, column: &str) -> Result<Option<Rect>, ErrorValue> {
        let t = self.table_index(table).ok_or_else(|| {
            ErrorValue::with_detail(ErrorKind::Name, format!("unknown table {table}"))
        })?;
        let t = &self.tables[t];
        let index = t.column_index(column).ok_or_else(|| {
            ErrorValue::with_detail(ErrorKind::Name, format!("unknown column {table}[{column}]"))
        })?;
        Ok(t.column_rect(index))
    }

    pub(super) fn evaluator(&self) -> Evaluator<'_> {
        Evaluator::new(self, &self.state.values, &self.state.placement, &self.state.cyclic)
    }
}

impl GridInfo for Workbook {
    fn is_formula(&self, sheet: usize, row: u32, col: u32) -> bool {
        self.content(CellKey::new(sheet, row, col))
            .is_some_and(Content::is_formula)
    }
}

impl fmt::Debug for Workbook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Workbook")
            .field("sheets", &self.sheets.iter().map(|s| &s.name).collect::<Vec<_>>())
            .field("names", &self.names.len())
            .field("tables", &self.tables.len())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_literal("42"), Content::literal(42.0));
        assert_eq!(parse_literal("true"), Content::literal(true));
        assert_eq!(parse_literal("#N/A"), Content::literal(Scalar::error(ErrorKind::Na)));
        assert_eq!(parse_literal("2015-04-01"), Content::date(42095));
        assert_eq!(parse_literal("\"12\""), Content::literal("12"));
        assert_eq!(parse_literal("\"say \"\"hi\"\"\""), Content::literal("say \"hi\""));
        assert_eq!(parse_literal("west"), Content::literal("west"));
        assert_eq!(parse_literal("25/12/2013"), Content::literal("25/12/2013"));
    }

    #[test]
    fn names_are_validated() {
        let mut wb = Workbook::new();
        wb.add_sheet("Sheet1").unwrap();
        let k = CellKey::new(0, 1, 1);
        assert!(wb.define_name("price.initial", NameBinding::Cell(k)).is_ok());
        assert_eq!(
            wb.define_name("PRICE.INITIAL", NameBinding::Cell(k)),
            Err(EditError::DuplicateName("PRICE.INITIAL".into()))
        );
        assert!(wb.define_name("B7", NameBinding::Cell(k)).is_err());
        assert!(wb.define_name("1x", NameBinding::Cell(k)).is_err());
        assert!(wb.add_sheet("sheet1").is_err());
    }

    #[test]
    fn table_overlap_is_rejected() {
        let mut wb = Workbook::new();
        wb.add_sheet("Sheet1").unwrap();
        wb.set_content(CellKey::new(0, 3, 2), Some(Content::literal(1.0))).unwrap();
        let err = wb
            .add_table("T", CellKey::new(0, 1, 1), vec!["a".into(), "b".into()], vec![
                vec![Content::literal(1.0), Content::literal(2.0)],
                vec![Content::literal(3.0), Content::literal(4.0)],
            ])
            .unwrap_err();
        assert_eq!(err, EditError::Overlap { table: "T".into(), cell: "B3".into() });
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn sheet_scans_agree_with_a_filter(
                edits in prop::collection::vec((1u32..9, 1u32..9, any::<bool>()), 0..60),
                (top, left) in (1u32..9, 1u32..9),
                (h, w) in (0u32..9, 0u32..9),
            ) {
                let mut sheet = Sheet::new("S");
                let mut model = BTreeMap::new();
                for (i, (r, c, keep)) in edits.into_iter().enumerate() {
                    let content = keep.then(|| Content::literal(i as f64));
                    match &content {
                        Some(x) => model.insert((r, c), x.clone()),
                        None => model.remove(&(r, c)),
                    };
                    sheet.set(r, c, content);
                }
                let got: Vec<_> = sheet.cells().map(|(k, c)| (k, c.clone())).collect();
                let want: Vec<_> = model.iter().map(|(k, c)| (*k, c.clone())).collect();
                prop_assert_eq!(&got, &want);

                let rect = Rect { sheet: 0, top, left, bottom: top + h, right: left + w };
                let got: Vec<_> = sheet.cells_in(&rect).map(|(k, c)| (k, c.clone())).collect();
                let want: Vec<_> = want
                    .into_iter()
                    .filter(|((r, c), _)| rect.contains(CellKey::new(0, *r, *c)))
                    .collect();
                prop_assert_eq!(got, want);
            }
        }
    }
}
