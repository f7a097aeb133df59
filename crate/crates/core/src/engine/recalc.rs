//! Fixed-point recalculation.
//!
//! Every recalculation starts from an empty spill placement and repeats
//! rounds of "evaluate in dependency order, then place spills" until the
//! placement stops changing. Within a round, reads of spilled cells use the
//! placement of the previous round. An incremental recalculation follows
//! exactly the same trajectory but reuses the cached value of any node that
//! neither depends on the edit nor on spill placement.

use std::collections::{HashMap, HashSet};

use super::eval::Evaluator;
use super::graph::{plan_order, Analysis};
use super::spill::Placement;
use super::{CalcReport, CellKey, NodeKey, Rect, Workbook};
use crate::value::{ErrorKind, Scalar, Value};

#[derive(Default)]
pub(crate) struct State {
    pub values: HashMap<NodeKey, Value>,
    pub placement: Placement,
    pub cyclic: HashSet<NodeKey>,
}

impl Workbook {
    /// Recalculates every formula from scratch.
    pub fn recalculate_full(&mut self) -> CalcReport {
        let analysis = Analysis::build(self);
        self.state.values.clear();
        let first = vec![true; analysis.nodes.len()];
        self.run(analysis, first, Vec::new())
    }

    /// Recalculates after the given cells changed (and, for a table append,
    /// after a table grew).
    pub(super) fn recalculate_after(&mut self, cells: &[CellKey], table: Option<usize>) -> CalcReport {
        let analysis = Analysis::build(self);
        let old = &self.state.placement;
        let seeds = analysis.nodes.iter().enumerate().filter_map(|(i, n)| {
            let extent = match n.key {
                NodeKey::Cell(k) => old.state(k).map(|s| {
                    let (rows, cols) = s.extent();
                    Rect::sized(k, rows, cols)
                }),
                NodeKey::Name(_) => None,
            };
            let hit = cells.iter().any(|&c| {
                n.key == NodeKey::Cell(c)
                    || n.reads.iter().any(|r| r.contains(c))
                    || n.spill_targets.contains(&c)
                    || extent.is_some_and(|e| e.contains(c))
            }) || table.is_some_and(|t| n.tables.contains(&t));
            hit.then_some(i)
        });
        let dirty = Analysis::closure(&Analysis::successors(&analysis.preds_with(old)), seeds);
        let observing = (0..analysis.nodes.len()).filter(|&i| analysis.nodes[i].observing);
        let mut first = Analysis::closure(
            &Analysis::successors(&analysis.static_preds),
            (0..analysis.nodes.len()).filter(|&i| dirty[i]).chain(observing),
        );
        for (i, n) in analysis.nodes.iter().enumerate() {
            if !self.state.values.contains_key(&n.key) {
                first[i] = true;
            }
        }
        let dirty_keys = (0..dirty.len())
            .filter(|&i| dirty[i])
            .map(|i| analysis.nodes[i].key.clone())
            .collect();
        self.run(analysis, first, dirty_keys)
    }

    fn place(&self, analysis: &Analysis, values: &HashMap<NodeKey, Value>, pinned: &HashSet<CellKey>) -> Placement {
        let anchors = analysis.nodes.iter().filter_map(|n| match n.key {
            NodeKey::Cell(k) => Some((k, values.get(&n.key).map_or((1, 1), Value::dims))),
            NodeKey::Name(_) => None,
        });
        let first_occupied = |rect: &Rect| {
            let sheet = self.sheets.get(rect.sheet)?;
            let anchor = (rect.top, rect.left);
            sheet
                .cells_in(rect)
                .map(|(at, _)| at)
                .find(|&at| at != anchor)
                .map(|(r, c)| CellKey::new(rect.sheet, r, c))
        };
        Placement::place(anchors, first_occupied, pinned)
    }

    fn run(&mut self, analysis: Analysis, first: Vec<bool>, dirty: Vec<NodeKey>) -> CalcReport {
        let n = analysis.nodes.len();
        let mut values = std::mem::take(&mut self.state.values);
        values.retain(|k, _| analysis.index.contains_key(k));
        let mut prev = Placement::default();
        let mut prev_cyclic = vec![false; n];
        let mut cyclic;
        let mut pinned = HashSet::new();
        let limit = n + 1;
        let mut rounds = 0;
        let mut evaluations = 0;

        loop {
            rounds += 1;
            let preds = analysis.preds_with(&prev);
            let plan = plan_order(&preds);
            cyclic = (0..n)
                .filter(|&i| plan.cyclic[i])
                .map(|i| analysis.nodes[i].key.clone())
                .collect();
            let mut changed = vec![false; n];
            for &i in &plan.order {
                let needs = if rounds == 1 {
                    first[i]
                } else {
                    analysis.nodes[i].observing
                        || plan.cyclic[i] != prev_cyclic[i]
                        || preds[i].iter().any(|&p| changed[p])
                };
                if !needs {
                    continue;
                }
                let key = &analysis.nodes[i].key;
                let value = if plan.cyclic[i] {
                    Scalar::error(ErrorKind::Circ).into()
                } else {
                    Evaluator::new(self, &values, &prev, &cyclic).eval_node(key)
                };
                evaluations += 1;
                if values.get(key) != Some(&value) {
                    changed[i] = true;
                    values.insert(key.clone(), value);
                }
            }
            prev_cyclic = plan.cyclic;

            let next = self.place(&analysis, &values, &pinned);
            if next == prev {
                break;
            }
            if !pinned.is_empty() {
                // final pass after pinning; accept whatever it produced
                prev = next;
                break;
            }
            if rounds >= limit {
                pinned = next
                    .states()
                    .filter(|(k, s)| prev.state(*k) != Some(*s))
                    .map(|(k, _)| k)
                    .collect();
                prev = self.place(&analysis, &values, &pinned);
                continue;
            }
            prev = next;
        }

        let mut unstable: Vec<CellKey> = pinned.into_iter().collect();
        unstable.sort();
        self.state = State {
            values,
            placement: prev,
            cyclic,
        };
        let mut census = std::collections::BTreeMap::new();
        for (_, e) in self.error_cells() {
            *census.entry(e.kind).or_insert(0) += 1;
        }
        CalcReport {
            rounds,
            nodes: n,
            evaluations,
            dirty,
            unstable,
            census,
            diagnostics: Vec::new(),
        }
    }
}
