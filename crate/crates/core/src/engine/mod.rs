//! Cell grid, dependency analysis, spill placement and recalculation.

mod eval;
mod graph;
mod recalc;
mod spill;
mod workbook;

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::{column_letters, Expr};
use crate::value::{ErrorKind, Scalar};

pub use graph::{plan_order, Plan};
pub use spill::{Blocker, SpillState};
pub use workbook::{parse_literal, EditError, NameBinding, NameDef, Sheet, Table, Trace, Workbook};

/// A cell position; rows and columns are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellKey {
    pub sheet: usize,
    pub row: u32,
    pub col: u32,
}

impl CellKey {
    pub fn new(sheet: usize, row: u32, col: u32) -> Self {
        CellKey { sheet, row, col }
    }

    /// `J8`, without the sheet.
    pub fn a1(&self) -> String {
        format!("{}{}", column_letters(self.col), self.row)
    }
}

/// An inclusive rectangle of cells on one sheet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    pub sheet: usize,
    pub top: u32,
    pub left: u32,
    pub bottom: u32,
    pub right: u32,
}

impl Rect {
    pub fn cell(key: CellKey) -> Rect {
        Rect {
            sheet: key.sheet,
            top: key.row,
            left: key.col,
            bottom: key.row,
            right: key.col,
        }
    }

    /// Rectangle spanned by two corners in any order.
    pub fn spanning(a: CellKey, b: CellKey) -> Rect {
        Rect {
            sheet: a.sheet,
            top: a.row.min(b.row),
            left: a.col.min(b.col),
            bottom: a.row.max(b.row),
            right: a.col.max(b.col),
        }
    }

    /// `rows × cols` rectangle whose top-left is `origin`.
    pub fn sized(origin: CellKey, rows: usize, cols: usize) -> Rect {
        Rect {
            sheet: origin.sheet,
            top: origin.row,
            left: origin.col,
            bottom: origin.row + rows as u32 - 1,
            right: origin.col + cols as u32 - 1,
        }
    }

    pub fn height(&self) -> usize {
        (self.bottom - self.top + 1) as usize
    }

    pub fn width(&self) -> usize {
        (self.right - self.left + 1) as usize
    }

    pub fn top_left(&self) -> CellKey {
        CellKey::new(self.sheet, self.top, self.left)
    }

    pub fn contains(&self, key: CellKey) -> bool {
        key.sheet == self.sheet
            && (self.top..=self.bottom).contains(&key.row)
            && (self.left..=self.right).contains(&key.col)
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.sheet == other.sheet
            && self.top <= other.bottom
            && other.top <= self.bottom
            && self.left <= other.right
            && other.left <= self.right
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = CellKey> + '_ {
        (self.top..=self.bottom)
            .flat_map(move |r| (self.left..=self.right).map(move |c| CellKey::new(self.sheet, r, c)))
    }

    /// `A1` or `A1:B2`, without the sheet.
    pub fn a1(&self) -> String {
        let tl = CellKey::new(self.sheet, self.top, self.left).a1();
        if self.top == self.bottom && self.left == self.right {
            tl
        } else {
            format!("{tl}:{}", CellKey::new(self.sheet, self.bottom, self.right).a1())
        }
    }
}

/// How a literal number is displayed in dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumberFormat {
    #[default]
    General,
    Date,
}

/// What the user put in a cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Content {
    Literal { value: Scalar, format: NumberFormat },
    Formula(Expr),
}

impl Content {
    pub fn literal(value: impl Into<Scalar>) -> Content {
        Content::Literal {
            value: value.into(),
            format: NumberFormat::General,
        }
    }

    pub fn date(serial: i64) -> Content {
        Content::Literal {
            value: Scalar::number(serial as f64),
            format: NumberFormat::Date,
        }
    }

    pub fn is_formula(&self) -> bool {
        matches!(self, Content::Formula(_))
    }
}

/// A recalculation graph node: a formula cell or a formula-bound name.
///
/// Names order before cells so that they win ties in evaluation order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKey {
    Name(usize),
    Cell(CellKey),
}

/// Summary of one recalculation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CalcReport {
    /// Evaluation rounds until spill placement stopped changing.
    pub rounds: usize,
    /// Formula nodes in the workbook.
    pub nodes: usize,
    /// Node evaluations performed across all rounds.
    pub evaluations: usize,
    /// Nodes invalidated by an edit; empty for a full recalculation.
    pub dirty: Vec<NodeKey>,
    /// Anchors whose spill never settled.
    pub unstable: Vec<CellKey>,
    /// Cells showing an error, by kind.
    pub census: BTreeMap<ErrorKind, usize>,
    pub diagnostics: Vec<String>,
}

impl CalcReport {
    pub fn error_count(&self) -> usize {
        self.census.values().sum()
    }
}

impl fmt::Display for CalcReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} nodes, {} rounds, {} evaluations, {} error cells",
            self.nodes,
            self.rounds,
            self.evaluations,
            self.error_count()
        )
    }
}
