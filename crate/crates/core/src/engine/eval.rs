use std::collections::{HashMap, HashSet};

use super::spill::{Placement, SpillState};
use super::{CellKey, Content, NameBinding, NodeKey, Rect, Workbook};
use crate::formula::{Expr, SpillTarget};
use crate::functions::{self, Arg, SliceAxis};
use crate::ops::{elementwise_binary, elementwise_unary};
use crate::value::{Array, ErrorKind, ErrorValue, Scalar, Value};

/// Evaluates formulas against node values and the spill placement of the
/// previous round.
pub(crate) struct Evaluator<'a> {
    wb: &'a Workbook,
    values: &'a HashMap<NodeKey, Value>,
    placement: &'a Placement,
    cyclic: &'a HashSet<NodeKey>,
}

/// Largest range a formula may read at once.
const MAX_RANGE_CELLS: u64 = 16_777_216;

fn circ() -> Scalar {
    Scalar::error(ErrorKind::Circ)
}

fn error(kind: ErrorKind, detail: impl Into<String>) -> Value {
    Value::Scalar(Scalar::Error(ErrorValue::with_detail(kind, detail)))
}

impl<'a> Evaluator<'a> {
    pub fn new(
        wb: &'a Workbook,
        values: &'a HashMap<NodeKey, Value>,
        placement: &'a Placement,
        cyclic: &'a HashSet<NodeKey>,
    ) -> Self {
        Evaluator {
            wb,
            values,
            placement,
            cyclic,
        }
    }

    pub fn eval_node(&self, key: &NodeKey) -> Value {
        match key {
            NodeKey::Cell(k) => match self.wb.content(*k) {
                Some(Content::Formula(e)) => self.eval(e, k.sheet),
                _ => unreachable!("node is a formula cell"),
            },
            NodeKey::Name(i) => match &self.wb.names[*i].binding {
                NameBinding::Formula(e) => self.eval(e, 0),
                NameBinding::Cell(_) => unreachable!("node is a formula name"),
            },
        }
    }

    fn node_value(&self, key: &NodeKey) -> Value {
        if self.cyclic.contains(key) {
            return circ().into();
        }
        self.values.get(key).cloned().unwrap_or_else(|| Scalar::empty().into())
    }

    /// What a cell shows: literal, anchor top-left (or `#SPILL!`), covered
    /// element, or empty text.
    pub fn read_cell(&self, key: CellKey) -> Scalar {
        let Some(sheet) = self.wb.sheets.get(key.sheet) else {
            return Scalar::error(ErrorKind::Ref);
        };
        match sheet.get(key.row, key.col) {
            Some(Content::Literal { value, .. }) => value.clone(),
            Some(Content::Formula(_)) => {
                let node = NodeKey::Cell(key);
                if self.cyclic.contains(&node) {
                    return circ();
                }
                if let Some(SpillState::Blocked(b)) = self.placement.state(key) {
                    return Scalar::Error(ErrorValue::with_detail(ErrorKind::Spill, b.detail()));
                }
                match self.values.get(&node) {
                    Some(v) => v.top_left().clone(),
                    None => Scalar::empty(),
                }
            }
            None => match self.placement.covering(key) {
                Some(anchor) => self
                    .values
                    .get(&NodeKey::Cell(anchor))
                    .and_then(|v| v.get((key.row - anchor.row) as usize, (key.col - anchor.col) as usize))
                    .cloned()
                    .unwrap_or_else(Scalar::empty),
                None => Scalar::empty(),
            },
        }
    }

    fn read_rect(&self, rect: &Rect) -> Value {
        let (h, w) = (rect.height(), rect.width());
        if h as u64 * w as u64 > MAX_RANGE_CELLS {
            return error(ErrorKind::Num, "range too large");
        }
        let mut cells = vec![None; h * w];
        for ((r, c), content) in self.wb.sheets[rect.sheet].cells_in(rect) {
            let at = (r - rect.top) as usize * w + (c - rect.left) as usize;
            cells[at] = Some(match content {
                Content::Literal { value, .. } => value.clone(),
                Content::Formula(_) => self.read_cell(CellKey::new(rect.sheet, r, c)),
            });
        }
        let mut spills = false;
        self.placement.anchors_covering(rect, |_| spills = true);
        let cells = cells
            .into_iter()
            .enumerate()
            .map(|(at, cell)| match cell {
                Some(s) => s,
                None if spills => self.read_cell(CellKey::new(
                    rect.sheet,
                    rect.top + (at / w) as u32,
                    rect.left + (at % w) as u32,
                )),
                None => Scalar::empty(),
            })
            .collect();
        Value::Array(Array::new(h, w, cells)).normalized()
    }

    /// Full result of the formula at `key`, for `key#`.
    fn spill_value(&self, key: CellKey, label: &dyn std::fmt::Display) -> Value {
        if !self.wb.content(key).is_some_and(Content::is_formula) {
            return error(ErrorKind::Ref, format!("{label}# does not refer to a formula"));
        }
        let node = NodeKey::Cell(key);
        if self.cyclic.contains(&node) {
            return circ().into();
        }
        if self.placement.is_blocked(key) {
            return error(ErrorKind::Ref, format!("{label}# refers to a blocked spill"));
        }
        self.node_value(&node)
    }

    fn unknown_name(name: &str) -> Value {
        error(ErrorKind::Name, format!("unknown name {name}"))
    }

    pub fn eval(&self, expr: &Expr, sheet: usize) -> Value {
        match expr {
            Expr::Number(n) => Scalar::number(*n).into(),
            Expr::Text(t) => Scalar::text(t.as_str()).into(),
            Expr::Bool(b) => Scalar::Bool(*b).into(),
            Expr::Cell(a) => match self.wb.resolve(a, sheet) {
                Some(k) => self.read_cell(k).into(),
                None => error(ErrorKind::Ref, format!("unknown sheet in {a}")),
            },
            Expr::Range(a, b) => match self.wb.range_rect(a, b, sheet) {
                Some(r) => self.read_rect(&r),
                None => error(ErrorKind::Ref, format!("bad range {a}:{b}")),
            },
            Expr::Name(n) => match self.wb.name_index(n) {
                Some(i) => match &self.wb.names[i].binding {
                    NameBinding::Cell(k) => self.read_cell(*k).into(),
                    NameBinding::Formula(_) => self.node_value(&NodeKey::Name(i)),
                },
                None => Self::unknown_name(n),
            },
            Expr::Spill(SpillTarget::Cell(a)) => match self.wb.resolve(a, sheet) {
                Some(k) => self.spill_value(k, a),
                None => error(ErrorKind::Ref, format!("unknown sheet in {a}")),
            },
            Expr::Spill(SpillTarget::Name(n)) => match self.wb.name_index(n) {
                Some(i) => match &self.wb.names[i].binding {
                    NameBinding::Cell(k) => self.spill_value(*k, n),
                    NameBinding::Formula(_) => {
                        error(ErrorKind::Ref, format!("{n} is a named formula and has no spill"))
                    }
                },
                None => Self::unknown_name(n),
            },
            Expr::TableColumn { table, column } => match self.wb.table_column(table, column) {
                Ok(Some(rect)) => self.read_rect(&rect),
                Ok(None) => error(ErrorKind::Calc, format!("{table}[{column}] has no rows")),
                Err(e) => e.into(),
            },
            Expr::Unary(op, e) => elementwise_unary(*op, &self.eval(e, sheet)),
            Expr::Binary(op, a, b) => elementwise_binary(*op, &self.eval(a, sheet), &self.eval(b, sheet)),
            Expr::Call(name, args) => self.call(name, args, sheet),
        }
    }

    /// Rectangle an expression refers to, for reference parameters.
    fn reference(&self, expr: &Expr, sheet: usize) -> Option<Rect> {
        match expr {
            Expr::Cell(a) => self.wb.resolve(a, sheet).map(Rect::cell),
            Expr::Range(a, b) => self.wb.range_rect(a, b, sheet),
            Expr::Name(n) => match &self.wb.names[self.wb.name_index(n)?].binding {
                NameBinding::Cell(k) => Some(Rect::cell(*k)),
                NameBinding::Formula(_) => None,
            },
            Expr::Spill(SpillTarget::Cell(a)) => self.spill_rect(self.wb.resolve(a, sheet)?),
            Expr::Spill(SpillTarget::Name(n)) => match &self.wb.names[self.wb.name_index(n)?].binding {
                NameBinding::Cell(k) => self.spill_rect(*k),
                NameBinding::Formula(_) => None,
            },
            Expr::TableColumn { table, column } => self.wb.table_column(table, column).ok().flatten(),
            _ => None,
        }
    }

    fn spill_rect(&self, anchor: CellKey) -> Option<Rect> {
        match self.placement.state(anchor)? {
            SpillState::Spilled { rows, cols } => Some(Rect::sized(anchor, *rows, *cols)),
            SpillState::Blocked(_) => None,
        }
    }

    fn call(&self, name: &str, args: &[Expr], sheet: usize) -> Value {
        let Some(sig) = functions::lookup(name) else {
            return error(ErrorKind::Name, format!("unknown function {name}"));
        };
        if !sig.accepts_arity(args.len()) {
            return error(ErrorKind::Value, format!("{name} takes a different number of arguments"));
        }
        let evaluated: Vec<Arg> = args
            .iter()
            .enumerate()
            .map(|(i, arg)| {
                if sig.mode(i) == functions::ParamMode::ReferenceLike {
                    if let Some(rect) = self.reference(arg, sheet) {
                        return Arg::Reference(rect);
                    }
                }
                if sig.aggregator {
                    if let Expr::Call(inner, inner_args) = arg {
                        let axis = match inner.as_str() {
                            "BYCOLUMN" => Some(SliceAxis::Columns),
                            "BYROW" => Some(SliceAxis::Rows),
                            _ => None,
                        };
                        if let (Some(axis), [x]) = (axis, inner_args.as_slice()) {
                            return Arg::Slices(axis, self.eval(x, sheet).into_array());
                        }
                    }
                }
                Arg::Value(self.eval(arg, sheet))
            })
            .collect();
        functions::call(sig, &evaluated, self.wb)
    }
}
