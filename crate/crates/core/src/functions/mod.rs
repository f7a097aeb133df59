//! Builtin function registry and dispatch.
//!
//! Every function declares how each parameter consumes its argument:
//!
//! * [`ParamMode::ScalarLifting`] parameters expect one scalar. Passing an
//!   array lifts the whole call: it runs once per cell of the joint
//!   broadcast of all lifted arguments and the results form an array.
//! * [`ParamMode::ArrayConsuming`] parameters take the whole value.
//! * [`ParamMode::ReferenceLike`] parameters take the referenced cells
//!   themselves rather than their values (`ISFORMULA`).
//!
//! `BYCOLUMN`/`BYROW` written directly inside an aggregator turn that
//! aggregator into a per-column or per-row reduction.

mod aggregate;
mod array;
mod criteria;
mod scalar;

use crate::engine::Rect;
use crate::ops::{broadcast_get, broadcast_shape};
use crate::value::{Array, ErrorKind, Scalar, Value};

pub use criteria::criterion_matches;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamMode {
    ScalarLifting,
    ArrayConsuming,
    ReferenceLike,
}

/// Direction of a `BYCOLUMN`/`BYROW` view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    Columns,
    Rows,
}

/// An evaluated argument.
#[derive(Debug, Clone, PartialEq)]
pub enum Arg {
    Value(Value),
    Reference(Rect),
    Slices(SliceAxis, Array),
}

impl Arg {
    pub fn value(&self) -> Option<&Value> {
        match self {
            Arg::Value(v) => Some(v),
            _ => None,
        }
    }
}

/// Read-only view of grid metadata.
pub trait GridInfo {
    fn is_formula(&self, sheet: usize, row: u32, col: u32) -> bool;
}

/// A grid with no formulas anywhere.
pub struct NoGrid;

impl GridInfo for NoGrid {
    fn is_formula(&self, _: usize, _: u32, _: u32) -> bool {
        false
    }
}

type Kernel = fn(&[&Arg], &dyn GridInfo) -> Value;

/// Runs a whole lifted call at once. Returns `None` to fall back to one
/// kernel call per cell; otherwise the result must equal that fallback.
type LiftedKernel = fn(&[&Arg]) -> Option<Value>;

pub struct FunctionSignature {
    pub name: &'static str,
    pub min_args: usize,
    /// `None` for variadic functions.
    pub max_args: Option<usize>,
    modes: &'static [ParamMode],
    /// Parameters past the declared list reuse `modes[repeat_from..]`.
    repeat_from: usize,
    /// Accepts `BYCOLUMN`/`BYROW` views.
    pub aggregator: bool,
    kernel: Kernel,
    lifted: Option<LiftedKernel>,
}

impl FunctionSignature {
    pub fn mode(&self, index: usize) -> ParamMode {
        if index < self.modes.len() {
            self.modes[index]
        } else {
            let cycle = self.modes.len() - self.repeat_from;
            self.modes[self.repeat_from + (index - self.repeat_from) % cycle]
        }
    }

    pub fn accepts_arity(&self, n: usize) -> bool {
        n >= self.min_args && self.max_args.is_none_or(|max| n <= max)
    }
}

use ParamMode::{ArrayConsuming as A, ReferenceLike as R, ScalarLifting as L};

macro_rules! sig {
    ($name:literal, $min:expr, $max:expr, [$($mode:expr),*], $kernel:expr) => {
        sig!($name, $min, $max, [$($mode),*], 0, false, $kernel)
    };
    ($name:literal, $min:expr, $max:expr, [$($mode:expr),*], $repeat:expr, $agg:expr, $kernel:expr) => {
        FunctionSignature {
            name: $name,
            min_args: $min,
            max_args: $max,
            modes: &[$($mode),*],
            repeat_from: $repeat,
            aggregator: $agg,
            kernel: $kernel,
            lifted: None,
        }
    };
    ($name:literal, $min:expr, $max:expr, [$($mode:expr),*], $repeat:expr, $agg:expr, $kernel:expr, $lifted:expr) => {
        FunctionSignature {
            lifted: Some($lifted),
            ..sig!($name, $min, $max, [$($mode),*], $repeat, $agg, $kernel)
        }
    };
}

static REGISTRY: &[FunctionSignature] = &[
    sig!("AND", 1, None, [A], 0, true, aggregate::and),
    sig!("BYCOLUMN", 1, Some(1), [A], array::identity),
    sig!("BYROW", 1, Some(1), [A], array::identity),
    sig!("COLUMNS", 1, Some(1), [A], array::columns),
    sig!("EOMONTH", 2, Some(2), [L, L], scalar::eomonth),
    sig!("IF", 2, Some(3), [L, L, L], scalar::if_),
    sig!("ISFORMULA", 1, Some(1), [R], array::isformula),
    sig!("LARGE", 2, Some(2), [A, L], aggregate::large),
    sig!("MAX", 1, None, [A], 0, true, aggregate::max),
    sig!("MIN", 1, None, [A], 0, true, aggregate::min),
    sig!("MMULT", 2, Some(2), [A, A], array::mmult),
    sig!("OR", 1, None, [A], 0, true, aggregate::or),
    sig!("PRODUCT", 1, None, [A], 0, true, aggregate::product),
    sig!("ROWS", 1, Some(1), [A], array::rows),
    sig!("SEQUENCE", 1, Some(4), [L, L, L, L], array::sequence),
    sig!("SIGN", 1, Some(1), [L], scalar::sign),
    sig!("SMALL", 2, Some(2), [A, L], aggregate::small),
    sig!("SORT", 1, Some(3), [A, L, L], array::sort),
    sig!("SUM", 1, None, [A], 0, true, aggregate::sum),
    sig!("SUMIFS", 3, None, [A, A, L], 1, false, criteria::sumifs, criteria::sumifs_lifted),
    sig!("TRANSPOSE", 1, Some(1), [A], array::transpose),
    sig!("UNIQUE", 1, Some(1), [A], array::unique),
];

/// Looks up a function by name (case-insensitive).
pub fn lookup(name: &str) -> Option<&'static FunctionSignature> {
    REGISTRY.iter().find(|s| s.name.eq_ignore_ascii_case(name))
}

/// Names of every registered function.
pub fn function_names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|s| s.name)
}

/// Calls a function on evaluated arguments.
///
/// Unknown functions give `#NAME?` and arity violations `#VALUE!`.
pub fn dispatch(name: &str, args: &[Arg], grid: &dyn GridInfo) -> Value {
    let Some(sig) = lookup(name) else {
        return Value::error(ErrorKind::Name);
    };
    if !sig.accepts_arity(args.len()) {
        return Value::error(ErrorKind::Value);
    }
    call(sig, args, grid)
}

pub(crate) fn call(sig: &FunctionSignature, args: &[Arg], grid: &dyn GridInfo) -> Value {
    let lifted: Vec<usize> = (0..args.len())
        .filter(|&i| sig.mode(i) == ParamMode::ScalarLifting)
        .filter(|&i| matches!(&args[i], Arg::Value(v) if v.dims() != (1, 1)))
        .collect();

    let refs: Vec<&Arg> = args.iter().collect();
    if lifted.is_empty() {
        return (sig.kernel)(&refs, grid).normalized();
    }
    if let Some(out) = sig.lifted.and_then(|f| f(&refs)) {
        return out.normalized();
    }
    lift_per_cell(sig, args, &lifted, grid)
}

fn lift_per_cell(sig: &FunctionSignature, args: &[Arg], lifted: &[usize], grid: &dyn GridInfo) -> Value {
    let (rows, cols) = lifted.iter().fold((1, 1), |(r, c), &i| {
        let (ar, ac) = args[i].value().expect("lifted args are values").dims();
        broadcast_shape(r, c, ar, ac)
    });
    Value::Array(Array::from_fn(rows, cols, |r, c| {
        let cell_args: Vec<Arg> = lifted
            .iter()
            .map(|&i| {
                let v = args[i].value().expect("lifted args are values");
                Arg::Value(Value::Scalar(broadcast_get(v, r, c)))
            })
            .collect();
        let refs: Vec<&Arg> = (0..args.len())
            .map(|i| match lifted.iter().position(|&l| l == i) {
                Some(k) => &cell_args[k],
                None => &args[i],
            })
            .collect();
        match (sig.kernel)(&refs, grid).normalized() {
            Value::Scalar(s) => s,
            // an array per cell would need nested arrays
            Value::Array(_) => Scalar::error(ErrorKind::Calc),
        }
    }))
    .normalized()
}

/// The sole scalar of an argument, or `#VALUE!` when it is a multi-cell
/// array or a reference.
fn scalar_arg(arg: &Arg) -> Scalar {
    match arg {
        Arg::Value(v) => v.as_scalar().cloned().unwrap_or_else(|| Scalar::error(ErrorKind::Value)),
        _ => Scalar::error(ErrorKind::Value),
    }
}

/// The argument as an array; references and slice views are rejected.
fn array_arg(arg: &Arg) -> Option<Array> {
    match arg {
        Arg::Value(v) => Some(v.clone().into_array()),
        Arg::Slices(_, a) => Some(a.clone()),
        Arg::Reference(_) => None,
    }
}

fn cells_arg(arg: &Arg) -> Option<&[Scalar]> {
    match arg {
        Arg::Value(v) => Some(v.cells()),
        Arg::Slices(_, a) => Some(a.cells()),
        Arg::Reference(_) => None,
    }
}

/// Numeric argument truncated toward zero.
fn int_arg(arg: &Arg) -> Result<i64, Scalar> {
    let s = scalar_arg(arg);
    match s.to_number() {
        Ok(n) if n.abs() < 9.0e15 => Ok(n.trunc() as i64),
        Ok(_) => Err(Scalar::error(ErrorKind::Num)),
        Err(e) => Err(Scalar::Error(e)),
    }
}
