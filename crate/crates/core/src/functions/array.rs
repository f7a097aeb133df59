use std::cmp::Ordering;
use std::collections::HashSet;

use super::{array_arg, int_arg, Arg, GridInfo};
use crate::ops::compare_values;
use crate::value::{Array, ErrorKind, Scalar, Value};

/// Largest array `SEQUENCE` will build.
const MAX_CELLS: i64 = 16_777_216;

pub(super) fn identity(args: &[&Arg], _: &dyn GridInfo) -> Value {
    match array_arg(args[0]) {
        Some(a) => Value::Array(a),
        None => Value::error(ErrorKind::Value),
    }
}

fn dimension(args: &[&Arg], pick: fn((usize, usize)) -> usize) -> Value {
    match args[0] {
        Arg::Value(v) => match v.as_error() {
            Some(e) if v.dims() == (1, 1) => e.clone().into(),
            _ => Value::from(pick(v.dims()) as f64),
        },
        Arg::Slices(_, a) => Value::from(pick(a.dims()) as f64),
        Arg::Reference(r) => Value::from(pick((r.height(), r.width())) as f64),
    }
}

pub(super) fn columns(args: &[&Arg], _: &dyn GridInfo) -> Value {
    dimension(args, |(_, c)| c)
}

pub(super) fn rows(args: &[&Arg], _: &dyn GridInfo) -> Value {
    dimension(args, |(r, _)| r)
}

pub(super) fn isformula(args: &[&Arg], grid: &dyn GridInfo) -> Value {
    match args[0] {
        Arg::Reference(r) => Value::Array(Array::from_fn(r.height(), r.width(), |i, j| {
            Scalar::Bool(grid.is_formula(r.sheet, r.top + i as u32, r.left + j as u32))
        }))
        .normalized(),
        Arg::Value(v) => match v.as_error() {
            Some(e) if v.dims() == (1, 1) => e.clone().into(),
            _ => Value::error(ErrorKind::Value),
        },
        Arg::Slices(..) => Value::error(ErrorKind::Value),
    }
}

pub(super) fn transpose(args: &[&Arg], _: &dyn GridInfo) -> Value {
    match array_arg(args[0]) {
        Some(a) => Value::Array(a.transpose()).normalized(),
        None => Value::error(ErrorKind::Value),
    }
}

pub(super) fn sequence(args: &[&Arg], _: &dyn GridInfo) -> Value {
    let int = |i: usize, default: i64| args.get(i).map_or(Ok(default), |a| int_arg(a));
    let (rows, cols) = match (int(0, 1), int(1, 1)) {
        (Ok(r), Ok(c)) => (r, c),
        (Err(e), _) | (_, Err(e)) => return e.into(),
    };
    let num = |i: usize| -> Result<f64, Scalar> {
        match args.get(i) {
            None => Ok(1.0),
            Some(a) => super::scalar_arg(a).to_number().map_err(Scalar::Error),
        }
    };
    let (start, step) = match (num(2), num(3)) {
        (Ok(s), Ok(t)) => (s, t),
        (Err(e), _) | (_, Err(e)) => return e.into(),
    };
    if rows < 1 || cols < 1 {
        return Value::error(ErrorKind::Value);
    }
    if rows.saturating_mul(cols) > MAX_CELLS {
        return Value::error(ErrorKind::Num);
    }
    let (rows, cols) = (rows as usize, cols as usize);
    Value::Array(Array::from_fn(rows, cols, |r, c| {
        Scalar::number(start + (r * cols + c) as f64 * step)
    }))
    .normalized()
}

#[derive(Hash, PartialEq, Eq)]
enum Key {
    Number(u64),
    Text(String),
    Bool(bool),
    Error(ErrorKind),
}

fn key(s: &Scalar) -> Key {
    match s {
        Scalar::Number(n) => Key::Number(n.to_bits()),
        Scalar::Text(t) => Key::Text(t.chars().flat_map(char::to_lowercase).collect()),
        Scalar::Bool(b) => Key::Bool(*b),
        Scalar::Error(e) => Key::Error(e.kind),
    }
}

/// Distinct rows in order of first appearance. Text compares
/// case-insensitively and the first spelling is kept.
pub(super) fn unique(args: &[&Arg], _: &dyn GridInfo) -> Value {
    let Some(a) = array_arg(args[0]) else {
        return Value::error(ErrorKind::Value);
    };
    let mut seen = HashSet::new();
    let mut kept = Vec::new();
    for row in a.iter_rows() {
        if seen.insert(row.iter().map(key).collect::<Vec<_>>()) {
            kept.push(row.to_vec());
        }
    }
    Value::Array(Array::from_rows(kept).expect("rows share a width")).normalized()
}

/// Stable sort of rows by one column. Error keys always sort last.
pub(super) fn sort(args: &[&Arg], _: &dyn GridInfo) -> Value {
    let Some(a) = array_arg(args[0]) else {
        return Value::error(ErrorKind::Value);
    };
    let index = match args.get(1).map_or(Ok(1), |x| int_arg(x)) {
        Ok(i) => i,
        Err(e) => return e.into(),
    };
    let order = match args.get(2).map_or(Ok(1), |x| int_arg(x)) {
        Ok(o) => o,
        Err(e) => return e.into(),
    };
    if index < 1 || index as usize > a.cols() || !(order == 1 || order == -1) {
        return Value::error(ErrorKind::Value);
    }
    let col = index as usize - 1;
    let mut rows: Vec<&[Scalar]> = a.iter_rows().collect();
    rows.sort_by(|x, y| match (x[col].is_error(), y[col].is_error()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        _ if order == 1 => compare_values(&x[col], &y[col]),
        _ => compare_values(&y[col], &x[col]),
    });
    let rows = rows.into_iter().map(<[Scalar]>::to_vec).collect();
    Value::Array(Array::from_rows(rows).expect("rows share a width")).normalized()
}

/// Matrix product, accumulated left to right from zero.
pub(super) fn mmult(args: &[&Arg], _: &dyn GridInfo) -> Value {
    let (Some(a), Some(b)) = (array_arg(args[0]), array_arg(args[1])) else {
        return Value::error(ErrorKind::Value);
    };
    if a.cols() != b.rows() {
        return Value::error(ErrorKind::Value);
    }
    let numbers = |m: &Array| -> Result<Vec<f64>, Scalar> {
        if let Some(e) = m.cells().iter().find(|s| s.is_error()) {
            return Err(e.clone());
        }
        m.cells()
            .iter()
            .map(|s| s.as_number().ok_or_else(|| Scalar::error(ErrorKind::Value)))
            .collect()
    };
    let (x, y) = match (numbers(&a), numbers(&b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return e.into(),
    };
    let (n, k, m) = (a.rows(), a.cols(), b.cols());
    Value::Array(Array::from_fn(n, m, |i, j| {
        Scalar::number((0..k).fold(0.0, |acc, t| acc + x[i * k + t] * y[t * m + j]))
    }))
    .normalized()
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::super::{dispatch, NoGrid};
    use super::*;
    use crate::engine::Rect;
    use proptest::prelude::*;

    #[test]
    fn sequence_examples() {
        assert_eq!(apply("SEQUENCE", vec![3.0.into()]), col(&[1.0, 2.0, 3.0]));
        assert_eq!(
            apply("SEQUENCE", vec![1.0.into(), 4.0.into(), 0.0.into(), 5.0.into()]),
            row(&[0.0, 5.0, 10.0, 15.0])
        );
        assert_eq!(apply("SEQUENCE", vec![2.9.into(), 2.0.into()]), grid(&[&[1.0, 2.0], &[3.0, 4.0]]));
        assert_eq!(apply("SEQUENCE", vec![0.0.into()]), Value::error(ErrorKind::Value));
        assert_eq!(apply("SEQUENCE", vec![1.0.into()]), Value::from(1.0));
    }

    #[test]
    fn unique_keeps_first_appearance() {
        let out = apply("UNIQUE", vec![texts(&["laptops", "Desktops", "laptops", "desktops", "tablets"])]);
        assert_eq!(out, texts(&["laptops", "Desktops", "tablets"]));
    }

    #[test]
    fn unique_of_rows() {
        let m = grid(&[&[1.0, 2.0], &[1.0, 2.0], &[1.0, 3.0]]);
        assert_eq!(apply("UNIQUE", vec![m]), grid(&[&[1.0, 2.0], &[1.0, 3.0]]));
    }

    #[test]
    fn sort_orders_and_errors_last() {
        let xs = Value::Array(Array::column(vec![
            num(3.0),
            Scalar::error(ErrorKind::Na),
            Scalar::text("b"),
            num(1.0),
            Scalar::Bool(false),
            Scalar::text("A"),
        ]));
        let asc = apply("SORT", vec![xs.clone()]);
        assert_eq!(
            asc.cells(),
            &[num(1.0), num(3.0), Scalar::text("A"), Scalar::text("b"), Scalar::Bool(false), Scalar::error(ErrorKind::Na)]
        );
        let desc = apply("SORT", vec![xs, 1.0.into(), (-1.0).into()]);
        assert_eq!(desc.cells()[0], Scalar::Bool(false));
        assert_eq!(desc.cells()[5], Scalar::error(ErrorKind::Na));
    }

    #[test]
    fn sort_rejects_bad_arguments() {
        let xs = col(&[2.0, 1.0]);
        assert_eq!(apply("SORT", vec![xs.clone(), 2.0.into()]), Value::error(ErrorKind::Value));
        assert_eq!(apply("SORT", vec![xs, 1.0.into(), 0.0.into()]), Value::error(ErrorKind::Value));
    }

    #[test]
    fn sort_is_stable_by_key_column() {
        let m = grid(&[&[2.0, 1.0], &[1.0, 2.0], &[2.0, 3.0], &[1.0, 4.0]]);
        let out = apply("SORT", vec![m]);
        assert_eq!(out, grid(&[&[1.0, 2.0], &[1.0, 4.0], &[2.0, 1.0], &[2.0, 3.0]]));
    }

    #[test]
    fn transpose_and_dimensions() {
        let m = grid(&[&[1.0, 2.0, 3.0]]);
        assert_eq!(apply("TRANSPOSE", vec![m.clone()]), col(&[1.0, 2.0, 3.0]));
        assert_eq!(apply("COLUMNS", vec![m.clone()]), Value::from(3.0));
        assert_eq!(apply("ROWS", vec![m]), Value::from(1.0));
        assert_eq!(apply("ROWS", vec![ErrorKind::Ref.into()]), Value::error(ErrorKind::Ref));
    }

    #[test]
    fn mmult_examples() {
        let a = grid(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = grid(&[&[5.0], &[6.0]]);
        assert_eq!(apply("MMULT", vec![a.clone(), b.clone()]), col(&[17.0, 39.0]));
        assert_eq!(apply("MMULT", vec![b, a.clone()]), Value::error(ErrorKind::Value));
        let t = Value::Array(Array::column(vec![Scalar::text("x"), num(1.0)]));
        assert_eq!(apply("MMULT", vec![a.clone(), t]), Value::error(ErrorKind::Value));
        let e = Value::Array(Array::column(vec![Scalar::error(ErrorKind::Div0), num(1.0)]));
        assert_eq!(apply("MMULT", vec![a, e]), Value::error(ErrorKind::Div0));
    }

    #[test]
    fn lower_triangle_times_column_is_running_sum() {
        let xs = [3.0, 1.5, 2.0, 7.25];
        let n = xs.len();
        let lower = Value::Array(Array::from_fn(n, n, |i, j| num(if j <= i { 1.0 } else { 0.0 })));
        let out = apply("MMULT", vec![lower, col(&xs)]);
        let mut acc = 0.0;
        for (i, x) in xs.iter().enumerate() {
            acc += x;
            assert_eq!(out.cells()[i], num(acc));
        }
    }

    #[test]
    fn isformula_needs_a_reference() {
        struct Diagonal;
        impl GridInfo for Diagonal {
            fn is_formula(&self, _: usize, row: u32, col: u32) -> bool {
                row == col
            }
        }
        let r = Rect { sheet: 0, top: 0, left: 0, bottom: 1, right: 1 };
        let out = dispatch("ISFORMULA", &[Arg::Reference(r)], &Diagonal);
        assert_eq!(out.cells(), &[true.into(), false.into(), false.into(), true.into()]);
        assert_eq!(dispatch("ISFORMULA", &[Arg::Value(1.0.into())], &NoGrid), Value::error(ErrorKind::Value));
    }

    fn small_scalar() -> impl Strategy<Value = Scalar> {
        prop_oneof![
            (-5i32..5).prop_map(|n| num(n as f64)),
            prop::sample::select(vec!["a", "A", "b", "B", "c"]).prop_map(Scalar::text),
            any::<bool>().prop_map(Scalar::Bool),
        ]
    }

    proptest! {
        #[test]
        fn unique_and_sort_are_idempotent(cells in prop::collection::vec(small_scalar(), 1..30)) {
            let v = Value::Array(Array::column(cells));
            let once = apply("UNIQUE", vec![v.clone()]);
            prop_assert_eq!(apply("UNIQUE", vec![once.clone()]), once);
            let sorted = apply("SORT", vec![v]);
            prop_assert_eq!(apply("SORT", vec![sorted.clone()]), sorted);
        }

        #[test]
        fn sequence_shape_law(r in 1i64..20, c in 1i64..20, start in -50i64..50, step in -5i64..5) {
            let out = apply("SEQUENCE", vec![(r as f64).into(), (c as f64).into(), (start as f64).into(), (step as f64).into()]);
            prop_assert_eq!(out.dims(), (r as usize, c as usize));
            for i in 0..r as usize {
                for j in 0..c as usize {
                    let expect = start + (i as i64 * c + j as i64) * step;
                    prop_assert_eq!(out.get(i, j).unwrap(), &num(expect as f64));
                }
            }
        }

        #[test]
        fn sorted_output_is_ordered_permutation(xs in prop::collection::vec(-100i32..100, 1..40)) {
            let v = Value::Array(Array::column(xs.iter().map(|&x| num(x as f64)).collect()));
            let out = apply("SORT", vec![v, 1.0.into(), (-1.0).into()]);
            let got: Vec<f64> = out.cells().iter().map(|s| s.as_number().unwrap()).collect();
            let mut expect: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
            expect.sort_by(|a, b| b.total_cmp(a));
            prop_assert_eq!(got, expect);
        }
    }
}
