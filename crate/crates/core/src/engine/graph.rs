use std::collections::{BTreeSet, HashMap};

use super::spill::Placement;
use super::{CellKey, Content, NameBinding, NodeKey, Rect, Workbook};
use crate::formula::{Expr, SpillTarget};

/// What a node reads, resolved against the current workbook.
#[derive(Debug, Clone)]
pub(crate) struct NodeInfo {
    pub key: NodeKey,
    pub reads: Vec<Rect>,
    pub spill_targets: Vec<CellKey>,
    pub names: Vec<usize>,
    pub tables: Vec<usize>,
    /// Result may depend on spill placement: the node follows a `#`
    /// reference or reads a cell that is empty or holds a formula.
    pub observing: bool,
}

pub(crate) struct Analysis {
    pub nodes: Vec<NodeInfo>,
    pub index: HashMap<NodeKey, usize>,
    pub static_preds: Vec<Vec<usize>>,
}

impl Analysis {
    pub fn build(wb: &Workbook) -> Analysis {
        let mut keys: Vec<NodeKey> = wb
            .names
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.binding, NameBinding::Formula(_)))
            .map(|(i, _)| NodeKey::Name(i))
            .collect();
        keys.extend(wb.formula_cells().into_iter().map(NodeKey::Cell));
        let index: HashMap<NodeKey, usize> =
            keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let nodes: Vec<NodeInfo> = keys.into_iter().map(|k| node_info(wb, k)).collect();
        let static_preds = nodes
            .iter()
            .map(|n| {
                let mut preds = BTreeSet::new();
                for rect in &n.reads {
                    for ((r, c), content) in wb.sheets[rect.sheet].cells_in(rect) {
                        if content.is_formula() {
                            preds.insert(index[&NodeKey::Cell(CellKey::new(rect.sheet, r, c))]);
                        }
                    }
                }
                for t in &n.spill_targets {
                    if let Some(&i) = index.get(&NodeKey::Cell(*t)) {
                        preds.insert(i);
                    }
                }
                for &name in &n.names {
                    preds.insert(index[&NodeKey::Name(name)]);
                }
                preds.into_iter().collect()
            })
            .collect();
        Analysis {
            nodes,
            index,
            static_preds,
        }
    }

    /// Static edges plus edges from spills covering cells a node reads.
    pub fn preds_with(&self, placement: &Placement) -> Vec<Vec<usize>> {
        self.nodes
            .iter()
            .zip(&self.static_preds)
            .map(|(n, stat)| {
                if !n.observing {
                    return stat.clone();
                }
                let mut preds: BTreeSet<usize> = stat.iter().copied().collect();
                for rect in &n.reads {
                    placement.anchors_covering(rect, |a| {
                        if let Some(&i) = self.index.get(&NodeKey::Cell(a)) {
                            preds.insert(i);
                        }
                    });
                }
                preds.into_iter().collect()
            })
            .collect()
    }

    /// Successor lists for the given predecessor lists.
    pub fn successors(preds: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let mut succs = vec![Vec::new(); preds.len()];
        for (v, ps) in preds.iter().enumerate() {
            for &u in ps {
                succs[u].push(v);
            }
        }
        succs
    }

    /// All nodes reachable from `seeds` along `succs`, seeds included.
    pub fn closure(succs: &[Vec<usize>], seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut marked = vec![false; succs.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut marked[v], true) {
                stack.extend(succs[v].iter().copied().filter(|&s| !marked[s]));
            }
        }
        marked
    }
}

fn node_info(wb: &Workbook, key: NodeKey) -> NodeInfo {
    let (expr, sheet) = match &key {
        NodeKey::Cell(k) => match wb.content(*k) {
            Some(Content::Formula(e)) => (e, k.sheet),
            _ => unreachable!("node is a formula cell"),
        },
        NodeKey::Name(i) => match &wb.names[*i].binding {
            NameBinding::Formula(e) => (e, 0),
            NameBinding::Cell(_) => unreachable!("node is a formula name"),
        },
    };
    let mut info = NodeInfo {
        key,
        reads: Vec::new(),
        spill_targets: Vec::new(),
        names: Vec::new(),
        tables: Vec::new(),
        observing: false,
    };
    collect(wb, expr, sheet, &mut info);
    info.reads.sort();
    info.reads.dedup();
    info.spill_targets.sort();
    info.spill_targets.dedup();
    info.names.sort();
    info.names.dedup();
    info.tables.sort();
    info.tables.dedup();
    info.observing = !info.spill_targets.is_empty()
        || info.reads.iter().any(|r| !all_literal(wb, r));
    info
}

fn all_literal(wb: &Workbook, rect: &Rect) -> bool {
    let area = rect.height() as u64 * rect.width() as u64;
    let mut literals = 0u64;
    for (_, content) in wb.sheets[rect.sheet].cells_in(rect) {
        if content.is_formula() {
            return false;
        }
        literals += 1;
    }
    literals == area
}

fn collect(wb: &Workbook, expr: &Expr, sheet: usize, info: &mut NodeInfo) {
    expr.walk(&mut |e| match e {
        Expr::Cell(a) => info.reads.extend(wb.resolve(a, sheet).map(Rect::cell)),
        Expr::Range(a, b) => info.reads.extend(wb.range_rect(a, b, sheet)),
        Expr::Name(n) => {
            if let Some(i) = wb.name_index(n) {
                match wb.names[i].binding {
                    NameBinding::Cell(k) => info.reads.push(Rect::cell(k)),
                    NameBinding::Formula(_) => info.names.push(i),
                }
            }
        }
        Expr::Spill(SpillTarget::Cell(a)) => info.spill_targets.extend(wb.resolve(a, sheet)),
        Expr::Spill(SpillTarget::Name(n)) => {
            if let Some(NameBinding::Cell(k)) = wb.name_index(n).map(|i| &wb.names[i].binding) {
                info.spill_targets.push(*k);
            }
        }
        Expr::TableColumn { table, column } => {
            if let Some(t) = wb.table_index(table) {
                info.tables.push(t);
            }
            if let Ok(Some(rect)) = wb.table_column(table, column) {
                info.reads.push(rect);
            }
        }
        _ => {}
    });
}

/// Evaluation order over a dependency graph given as predecessor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    /// Every node once; predecessors first, lower indices first among
    /// independent nodes.
    pub order: Vec<usize>,
    /// Nodes on a cycle (a strongly connected component with more than one
    /// node, or a node reading itself).
    pub cyclic: Vec<bool>,
}

/// Orders nodes so that each comes after its predecessors, collapsing
/// cycles into single steps.
pub fn plan_order(preds: &[Vec<usize>]) -> Plan {
    let n = preds.len();
    let succs = Analysis::successors(preds);
    let comp = tarjan(&succs);
    let comp_count = comp.iter().map(|&c| c + 1).max().unwrap_or(0);

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); comp_count];
    for v in 0..n {
        members[comp[v]].push(v);
    }
    let mut cyclic = vec![false; n];
    for (v, ps) in preds.iter().enumerate() {
        if members[comp[v]].len() > 1 || ps.contains(&v) {
            cyclic[v] = true;
        }
    }

    let mut indegree = vec![0usize; comp_count];
    let mut comp_succs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comp_count];
    for (u, ss) in succs.iter().enumerate() {
        for &v in ss {
            if comp[u] != comp[v] && comp_succs[comp[u]].insert(comp[v]) {
                indegree[comp[v]] += 1;
            }
        }
    }
    // components are keyed by their smallest member for tie-breaking
    let mut ready: BTreeSet<(usize, usize)> = (0..comp_count)
        .filter(|&c| indegree[c] == 0)
        .map(|c| (members[c][0], c))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some((_, c)) = ready.pop_first() {
        order.extend(&members[c]);
        for &d in &comp_succs[c] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.insert((members[d][0], d));
            }
        }
    }
    Plan { order, cyclic }
}

/// Iterative Tarjan; returns the component id of every node.
fn tarjan(succs: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = succs.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut next_comp = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, edge)) = call.last() {
            if let Some(&w) = succs[v].get(edge) {
                call.last_mut().expect("frame").1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("component member on stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}
