use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::{CellKey, Rect};
use crate::formula::{MAX_COLS, MAX_ROWS};

/// Why an anchor could not spill.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Blocker {
    /// First occupied cell in row-major order.
    Cell(CellKey),
    OutOfBounds,
    /// Placement kept changing until the round limit.
    Unstable,
}

impl fmt::Display for Blocker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Blocker::Cell(k) => f.write_str(&k.a1()),
            Blocker::OutOfBounds => f.write_str("out-of-bounds"),
            Blocker::Unstable => f.write_str("unstable"),
        }
    }
}

impl Blocker {
    /// Detail text carried by the anchor's `#SPILL!`.
    pub fn detail(&self) -> String {
        match self {
            Blocker::Cell(k) => format!("blocked by {}", k.a1()),
            Blocker::OutOfBounds => "out of bounds".to_string(),
            Blocker::Unstable => "unstable spill".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpillState {
    Spilled { rows: usize, cols: usize },
    Blocked(Blocker),
}

impl SpillState {
    /// Occupied extent; a blocked anchor occupies only itself.
    pub fn extent(&self) -> (usize, usize) {
        match self {
            SpillState::Spilled { rows, cols } => (*rows, *cols),
            SpillState::Blocked(_) => (1, 1),
        }
    }

    pub fn blocker(&self) -> Option<&Blocker> {
        match self {
            SpillState::Blocked(b) => Some(b),
            _ => None,
        }
    }
}

/// Spill state of every anchor plus the cells their spills cover.
#[derive(Debug, Clone, Default)]
pub(crate) struct Placement {
    states: BTreeMap<CellKey, SpillState>,
    covered: HashMap<CellKey, CellKey>,
    /// Anchors spilling beyond their own cell.
    spilled: Vec<(CellKey, Rect)>,
}

impl PartialEq for Placement {
    fn eq(&self, other: &Self) -> bool {
        self.states == other.states
    }
}

impl Placement {
    pub fn state(&self, anchor: CellKey) -> Option<&SpillState> {
        self.states.get(&anchor)
    }

    pub fn states(&self) -> impl Iterator<Item = (CellKey, &SpillState)> {
        self.states.iter().map(|(k, s)| (*k, s))
    }

    pub fn covering(&self, key: CellKey) -> Option<CellKey> {
        self.covered.get(&key).copied()
    }

    pub fn is_blocked(&self, anchor: CellKey) -> bool {
        matches!(self.states.get(&anchor), Some(SpillState::Blocked(_)))
    }

    /// Anchors whose spill covers some cell of `rect` other than the anchor
    /// itself.
    pub fn anchors_covering(&self, rect: &Rect, mut f: impl FnMut(CellKey)) {
        let area = rect.height() as u64 * rect.width() as u64;
        if area <= 4 * self.spilled.len() as u64 {
            let mut seen = HashSet::new();
            for key in rect.cells() {
                if let Some(a) = self.covering(key) {
                    if seen.insert(a) {
                        f(a);
                    }
                }
            }
        } else {
            for (anchor, extent) in &self.spilled {
                if extent.intersects(rect) && !(Rect::cell(*anchor) == overlap(extent, rect)) {
                    f(*anchor);
                }
            }
        }
    }

    /// Greedy placement in (sheet, row, col) order. `anchors` must be sorted;
    /// `first_occupied` finds the first cell of a rectangle, after its
    /// top-left, that holds content.
    pub fn place(
        anchors: impl IntoIterator<Item = (CellKey, (usize, usize))>,
        first_occupied: impl Fn(&Rect) -> Option<CellKey>,
        pinned: &HashSet<CellKey>,
    ) -> Placement {
        let mut p = Placement::default();
        for (anchor, (rows, cols)) in anchors {
            let state = if pinned.contains(&anchor) {
                SpillState::Blocked(Blocker::Unstable)
            } else if (rows, cols) == (1, 1) {
                SpillState::Spilled { rows, cols }
            } else if anchor.row as u64 + rows as u64 - 1 > MAX_ROWS as u64
                || anchor.col as u64 + cols as u64 - 1 > MAX_COLS as u64
            {
                SpillState::Blocked(Blocker::OutOfBounds)
            } else {
                let rect = Rect::sized(anchor, rows, cols);
                // an earlier spill never covers this anchor (it would have
                // been blocked by it), so overlaps start after the top-left
                let covered = p
                    .spilled
                    .iter()
                    .filter(|(_, extent)| extent.intersects(&rect))
                    .map(|(_, extent)| overlap(extent, &rect).top_left());
                let blocker = first_occupied(&rect).into_iter().chain(covered).min();
                match blocker {
                    Some(k) => SpillState::Blocked(Blocker::Cell(k)),
                    None => {
                        for k in rect.cells().skip(1) {
                            p.covered.insert(k, anchor);
                        }
                        p.spilled.push((anchor, rect));
                        SpillState::Spilled { rows, cols }
                    }
                }
            };
            p.states.insert(anchor, state);
        }
        p
    }
}

fn overlap(a: &Rect, b: &Rect) -> Rect {
    Rect {
        sheet: a.sheet,
        top: a.top.max(b.top),
        left: a.left.max(b.left),
        bottom: a.bottom.min(b.bottom),
        right: a.right.min(b.right),
    }
}
