//! Text renderings of a recalculated workbook. Output is tab separated with
//! LF line endings and depends only on workbook state.

use std::collections::BTreeMap;
use std::fmt::Write;

use thiserror::Error;

use crate::date::{DateSerial, MAX_SERIAL};
use crate::engine::{CellKey, Content, NumberFormat, SpillState, Workbook};
use crate::formula::render_formula;
use crate::value::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DumpError {
    #[error("unknown sheet '{0}'")]
    UnknownSheet(String),
}

fn sheet_index(wb: &Workbook, sheet: &str) -> Result<usize, DumpError> {
    wb.sheet_index(sheet)
        .ok_or_else(|| DumpError::UnknownSheet(sheet.to_string()))
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn render_cell(wb: &Workbook, key: CellKey) -> String {
    let value = wb.value_at(key);
    let dated = matches!(wb.content(key), Some(Content::Literal { format: NumberFormat::Date, .. }));
    match value {
        Scalar::Number(n) if dated && n.fract() == 0.0 && (0.0..=MAX_SERIAL as f64).contains(&n) => {
            DateSerial(n as i64).to_string()
        }
        Scalar::Text(t) => escape(&t),
        other => other.to_string(),
    }
}

/// The sheet's grid from `A1` to the bottom-right of its literals and spill
/// extents, one line per row.
pub fn dump_values(wb: &Workbook, sheet: &str) -> Result<String, DumpError> {
    let s = sheet_index(wb, sheet)?;
    let mut out = String::new();
    let Some((rows, cols)) = wb.used_extent(s) else {
        return Ok(out);
    };
    for r in 1..=rows {
        for c in 1..=cols {
            if c > 1 {
                out.push('\t');
            }
            out.push_str(&render_cell(wb, CellKey::new(s, r, c)));
        }
        out.push('\n');
    }
    Ok(out)
}

/// One line per formula cell: address, extent and canonical formula.
pub fn dump_formula_map(wb: &Workbook, sheet: &str) -> Result<String, DumpError> {
    let s = sheet_index(wb, sheet)?;
    let mut out = String::new();
    for key in wb.formula_cells().into_iter().filter(|k| k.sheet == s) {
        let Some(Content::Formula(expr)) = wb.content(key) else {
            continue;
        };
        let (rows, cols) = wb.spill_state(key).map_or((1, 1), SpillState::extent);
        writeln!(out, "{}\t{rows}x{cols}\t={}", key.a1(), render_formula(expr)).unwrap();
    }
    Ok(out)
}

/// One line per formula cell of every sheet: address, extent and `ok` or
/// the reason it could not spill.
pub fn dump_spill_map(wb: &Workbook) -> String {
    let mut out = String::new();
    for (key, state) in wb.spill_states() {
        let (rows, cols) = state.extent();
        let status = match state {
            SpillState::Spilled { .. } => "ok".to_string(),
            SpillState::Blocked(b) => format!("SPILL:{b}"),
        };
        writeln!(out, "{} {rows}x{cols} {status}", wb.display_key(key)).unwrap();
    }
    out
}

/// Error cells with their details, then a count per error kind and a total.
pub fn lint_report(wb: &Workbook) -> (String, usize) {
    let mut out = String::new();
    let mut census: BTreeMap<&'static str, usize> = BTreeMap::new();
    let errors = wb.error_cells();
    for (key, e) in &errors {
        let detail = e.detail.as_deref().unwrap_or("");
        writeln!(out, "{} {} {}", wb.display_key(*key), e.kind, escape(detail)).unwrap();
        *census.entry(e.kind.as_str()).or_default() += 1;
    }
    for (kind, n) in &census {
        writeln!(out, "{kind} {n}").unwrap();
    }
    let n = errors.len();
    writeln!(out, "{n} {}", if n == 1 { "error" } else { "errors" }).unwrap();
    (out, n)
}
