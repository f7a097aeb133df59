//! Reducing functions. Text and boolean cells are skipped, error cells
//! propagate.

use super::{Arg, GridInfo, SliceAxis};
use crate::value::{Array, ErrorKind, ErrorValue, Scalar, Value};

#[derive(Clone, Copy)]
enum Reduce {
    Sum,
    Product,
    Min,
    Max,
    And,
    Or,
}

impl Reduce {
    fn apply<'a>(self, cells: impl Iterator<Item = &'a Scalar>) -> Scalar {
        match self {
            Reduce::And | Reduce::Or => {
                let mut seen = false;
                let mut acc = matches!(self, Reduce::And);
                for cell in cells {
                    let b = match cell {
                        Scalar::Error(e) => return Scalar::Error(e.clone()),
                        Scalar::Bool(b) => *b,
                        Scalar::Number(n) => *n != 0.0,
                        Scalar::Text(_) => continue,
                    };
                    seen = true;
                    acc = if matches!(self, Reduce::And) { acc && b } else { acc || b };
                }
                if seen {
                    Scalar::Bool(acc)
                } else {
                    Scalar::error(ErrorKind::Value)
                }
            }
            _ => match numbers(cells) {
                Err(e) => Scalar::Error(e),
                Ok(xs) => Scalar::number(match self {
                    Reduce::Sum => xs.iter().fold(0.0, |a, x| a + x),
                    Reduce::Product if xs.is_empty() => 0.0,
                    Reduce::Product => xs.iter().fold(1.0, |a, x| a * x),
                    Reduce::Min => xs.iter().copied().reduce(f64::min).unwrap_or(0.0),
                    Reduce::Max => xs.iter().copied().reduce(f64::max).unwrap_or(0.0),
                    Reduce::And | Reduce::Or => unreachable!(),
                }),
            },
        }
    }
}

fn numbers<'a>(cells: impl Iterator<Item = &'a Scalar>) -> Result<Vec<f64>, ErrorValue> {
    let mut out = Vec::new();
    for cell in cells {
        match cell {
            Scalar::Number(n) => out.push(*n),
            Scalar::Error(e) => return Err(e.clone()),
            Scalar::Text(_) | Scalar::Bool(_) => {}
        }
    }
    Ok(out)
}

fn arg_cells(arg: &Arg) -> &[Scalar] {
    match arg {
        Arg::Value(v) => v.cells(),
        Arg::Slices(_, a) => a.cells(),
        Arg::Reference(_) => &[],
    }
}

fn reduce(args: &[&Arg], how: Reduce) -> Value {
    if args.iter().any(|a| matches!(a, Arg::Reference(_))) {
        return Value::error(ErrorKind::Value);
    }
    let views: Vec<(SliceAxis, &Array)> = args
        .iter()
        .filter_map(|a| match a {
            Arg::Slices(axis, arr) => Some((*axis, arr)),
            _ => None,
        })
        .collect();
    let Some(&(axis, first)) = views.first() else {
        return Value::Scalar(how.apply(args.iter().flat_map(|a| arg_cells(a).iter())));
    };
    let count = |arr: &Array| match axis {
        SliceAxis::Columns => arr.cols(),
        SliceAxis::Rows => arr.rows(),
    };
    let n = count(first);
    if views.iter().any(|&(ax, arr)| ax != axis || count(arr) != n) {
        return Value::error(ErrorKind::Value);
    }
    let results: Vec<Scalar> = (0..n)
        .map(|k| {
            let cells = args.iter().flat_map(move |a| -> Box<dyn Iterator<Item = &Scalar>> {
                match a {
                    Arg::Slices(SliceAxis::Columns, arr) => Box::new(arr.column_cells(k)),
                    Arg::Slices(SliceAxis::Rows, arr) => Box::new(arr.row_slice(k).iter()),
                    other => Box::new(arg_cells(other).iter()),
                }
            });
            how.apply(cells)
        })
        .collect();
    Value::Array(match axis {
        SliceAxis::Columns => Array::row(results),
        SliceAxis::Rows => Array::column(results),
    })
}

pub(super) fn sum(args: &[&Arg], _: &dyn GridInfo) -> Value {
    reduce(args, Reduce::Sum)
}

pub(super) fn product(args: &[&Arg], _: &dyn GridInfo) -> Value {
    reduce(args, Reduce::Product)
}

pub(super) fn min(args: &[&Arg], _: &dyn GridInfo) -> Value {
    reduce(args, Reduce::Min)
}

pub(super) fn max(args: &[&Arg], _: &dyn GridInfo) -> Value {
    reduce(args, Reduce::Max)
}

pub(super) fn and(args: &[&Arg], _: &dyn GridInfo) -> Value {
    reduce(args, Reduce::And)
}

pub(super) fn or(args: &[&Arg], _: &dyn GridInfo) -> Value {
    reduce(args, Reduce::Or)
}

fn kth(args: &[&Arg], largest: bool) -> Value {
    let mut xs = match numbers(arg_cells(args[0]).iter()) {
        Ok(xs) => xs,
        Err(e) => return Value::Scalar(Scalar::Error(e)),
    };
    let k = match super::scalar_arg(args[1]).to_number() {
        Ok(k) => k.ceil(),
        Err(e) => return Value::Scalar(Scalar::Error(e)),
    };
    if k < 1.0 || k > xs.len() as f64 {
        return Value::error(ErrorKind::Num);
    }
    xs.sort_by(f64::total_cmp);
    if largest {
        xs.reverse();
    }
    Value::from(xs[k as usize - 1])
}

pub(super) fn small(args: &[&Arg], _: &dyn GridInfo) -> Value {
    kth(args, false)
}

pub(super) fn large(args: &[&Arg], _: &dyn GridInfo) -> Value {
    kth(args, true)
}
