//! A spreadsheet formula engine with dynamic-array semantics.
//!
//! A formula lives in one anchor cell and may return a whole array, which
//! spills into the empty cells below and to the right of the anchor. Other
//! formulas refer to the spilled array with the `#` operator (`A1#`,
//! `amount#`), and the engine keeps spills, dependencies and values
//! consistent through full and incremental recalculation.
//!
//! ```
//! use spillgrid::{CellKey, Workbook};
//!
//! let mut wb = Workbook::new();
//! wb.add_sheet("Sheet1").unwrap();
//! wb.apply_edit(CellKey::new(0, 1, 1), "=SEQUENCE(3)").unwrap();
//! wb.apply_edit(CellKey::new(0, 1, 2), "=SUM(A1#)").unwrap();
//! assert_eq!(wb.value_at(CellKey::new(0, 3, 1)), 3.0.into());
//! assert_eq!(wb.value_at(CellKey::new(0, 1, 2)), 6.0.into());
//! ```

pub mod date;
pub mod engine;
pub mod formula;
pub mod functions;
pub mod io;
pub mod ops;
pub mod value;

pub use date::DateSerial;
pub use engine::{
    Blocker, CalcReport, CellKey, Content, EditError, NameBinding, NumberFormat, Rect, SpillState,
    Trace, Workbook,
};
pub use formula::{parse_formula, render_formula, Expr, ParseError};
pub use value::{Array, ErrorKind, ErrorValue, Scalar, Value};

/// The guide's chapters, compiled and run as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/spilling.md")]
    struct Spilling;
    #[doc = include_str!("../../../book/src/recalculation.md")]
    struct Recalculation;
    #[doc = include_str!("../../../book/src/crosstabs.md")]
    struct Crosstabs;
    #[doc = include_str!("../../../book/src/modelling.md")]
    struct Modelling;
    #[doc = include_str!("../../../book/src/files.md")]
    struct Files;
    #[doc = include_str!("../../../book/src/functions.md")]
    struct Functions;
}
