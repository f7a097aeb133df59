use std::collections::BTreeSet;

use super::address::CellAddress;
use super::ast::{Expr, SpillTarget};

/// Every reference that appears in a formula, unresolved.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceSet {
    pub cells: BTreeSet<CellAddress>,
    pub ranges: BTreeSet<(CellAddress, CellAddress)>,
    pub names: BTreeSet<String>,
    pub spill_targets: BTreeSet<SpillTarget>,
    pub table_columns: BTreeSet<(String, String)>,
}

impl ReferenceSet {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
            && self.ranges.is_empty()
            && self.names.is_empty()
            && self.spill_targets.is_empty()
            && self.table_columns.is_empty()
    }
}

pub fn extract_references(expr: &Expr) -> ReferenceSet {
    let mut refs = ReferenceSet::default();
    expr.walk(&mut |e| match e {
        Expr::Cell(a) => {
            refs.cells.insert(a.clone());
        }
        Expr::Range(a, b) => {
            refs.ranges.insert((a.clone(), b.clone()));
        }
        Expr::Name(n) => {
            refs.names.insert(n.clone());
        }
        Expr::Spill(t) => {
            refs.spill_targets.insert(t.clone());
        }
        Expr::TableColumn { table, column } => {
            refs.table_columns.insert((table.clone(), column.clone()));
        }
        _ => {}
    });
    refs
}
