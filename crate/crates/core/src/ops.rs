//! Operators and elementwise broadcasting.
//!
//! Binary operators apply cell by cell over the broadcast of their operands.
//! A dimension of 1 stretches to match the other operand; where two unequal
//! dimensions both exceed 1 the result takes the larger one and the cells the
//! shorter operand cannot reach are `#N/A`.

use std::cmp::Ordering;
use std::fmt;

use crate::value::{Array, ErrorKind, ErrorValue, Scalar, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Concat,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
            BinaryOp::Concat => "&",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
        }
    }

    /// Binding strength, higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 1,
            BinaryOp::Concat => 2,
            BinaryOp::Add | BinaryOp::Sub => 3,
            BinaryOp::Mul | BinaryOp::Div => 4,
            BinaryOp::Pow => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 1
    }
}

impl fmt::Display for BinaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Plus,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
        }
    }
}

/// Result dimensions of broadcasting a `(rows, cols)` pair against another.
pub fn broadcast_shape(a_rows: usize, a_cols: usize, b_rows: usize, b_cols: usize) -> (usize, usize) {
    (a_rows.max(b_rows), a_cols.max(b_cols))
}

/// Maps a result index onto an operand dimension: identity when in range,
/// 0 for a stretched dimension, `None` when the operand cannot reach it.
pub fn broadcast_index(dim: usize, i: usize) -> Option<usize> {
    if dim == 1 {
        Some(0)
    } else if i < dim {
        Some(i)
    } else {
        None
    }
}

/// The operand cell feeding result cell `(r, c)`, or `#N/A` if out of reach.
pub fn broadcast_get(v: &Value, r: usize, c: usize) -> Scalar {
    let (rows, cols) = v.dims();
    match (broadcast_index(rows, r), broadcast_index(cols, c)) {
        (Some(i), Some(j)) => v.get(i, j).cloned().unwrap_or_else(|| Scalar::error(ErrorKind::Na)),
        _ => Scalar::error(ErrorKind::Na),
    }
}

pub fn elementwise_binary(op: BinaryOp, a: &Value, b: &Value) -> Value {
    if let (Some(x), Some(y)) = (a.as_scalar(), b.as_scalar()) {
        return Value::Scalar(apply_binary(op, x, y));
    }
    let (ar, ac) = a.dims();
    let (br, bc) = b.dims();
    let (rows, cols) = broadcast_shape(ar, ac, br, bc);
    Value::Array(Array::from_fn(rows, cols, |r, c| {
        apply_binary(op, &broadcast_get(a, r, c), &broadcast_get(b, r, c))
    }))
}

pub fn elementwise_unary(op: UnaryOp, v: &Value) -> Value {
    let f = |s: &Scalar| match op {
        UnaryOp::Plus => s.clone(),
        UnaryOp::Neg => match s.to_number() {
            Ok(n) => Scalar::number(-n),
            Err(e) => Scalar::Error(e),
        },
    };
    match v {
        Value::Scalar(s) => Value::Scalar(f(s)),
        Value::Array(a) => Value::Array(a.map(f)),
    }
}

/// Applies `op` to two scalars. The left operand's error wins.
pub fn apply_binary(op: BinaryOp, a: &Scalar, b: &Scalar) -> Scalar {
    if let Scalar::Error(e) = a {
        return Scalar::Error(e.clone());
    }
    if let Scalar::Error(e) = b {
        return Scalar::Error(e.clone());
    }
    match op {
        BinaryOp::Concat => match (a.to_text(), b.to_text()) {
            (Ok(x), Ok(y)) => Scalar::Text(x + &y),
            (Err(e), _) | (_, Err(e)) => Scalar::Error(e),
        },
        BinaryOp::Eq => Scalar::Bool(compare_values(a, b) == Ordering::Equal),
        BinaryOp::Ne => Scalar::Bool(compare_values(a, b) != Ordering::Equal),
        BinaryOp::Lt => Scalar::Bool(compare_values(a, b) == Ordering::Less),
        BinaryOp::Le => Scalar::Bool(compare_values(a, b) != Ordering::Greater),
        BinaryOp::Gt => Scalar::Bool(compare_values(a, b) == Ordering::Greater),
        BinaryOp::Ge => Scalar::Bool(compare_values(a, b) != Ordering::Less),
        BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Pow => {
            let x = match a.to_number() {
                Ok(x) => x,
                Err(e) => return Scalar::Error(e),
            };
            let y = match b.to_number() {
                Ok(y) => y,
                Err(e) => return Scalar::Error(e),
            };
            arithmetic(op, x, y)
        }
    }
}

fn arithmetic(op: BinaryOp, x: f64, y: f64) -> Scalar {
    match op {
        BinaryOp::Add => Scalar::number(x + y),
        BinaryOp::Sub => Scalar::number(x - y),
        BinaryOp::Mul => Scalar::number(x * y),
        BinaryOp::Div if y == 0.0 => Scalar::error(ErrorKind::Div0),
        BinaryOp::Div => Scalar::number(x / y),
        BinaryOp::Pow if x == 0.0 && y == 0.0 => Scalar::error(ErrorKind::Num),
        BinaryOp::Pow if x == 0.0 && y < 0.0 => Scalar::error(ErrorKind::Div0),
        BinaryOp::Pow => Scalar::number(x.powf(y)),
        _ => unreachable!("not an arithmetic operator"),
    }
}

fn type_rank(s: &Scalar) -> u8 {
    match s {
        Scalar::Number(_) => 0,
        Scalar::Text(_) => 1,
        Scalar::Bool(_) => 2,
        Scalar::Error(_) => 3,
    }
}

/// Total order used by comparison operators and `SORT`: numbers, then text
/// (case-folded, codepoint order), then booleans with FALSE before TRUE.
/// Errors sort after everything and compare equal among themselves.
pub fn compare_values(a: &Scalar, b: &Scalar) -> Ordering {
    match (a, b) {
        (Scalar::Number(x), Scalar::Number(y)) => x.total_cmp(y),
        (Scalar::Text(x), Scalar::Text(y)) => compare_text(x, y),
        (Scalar::Bool(x), Scalar::Bool(y)) => x.cmp(y),
        _ => type_rank(a).cmp(&type_rank(b)),
    }
}

/// Case-insensitive text ordering.
pub fn compare_text(a: &str, b: &str) -> Ordering {
    a.chars()
        .flat_map(char::to_lowercase)
        .cmp(b.chars().flat_map(char::to_lowercase))
}

/// Case-insensitive text equality.
pub fn text_eq(a: &str, b: &str) -> bool {
    compare_text(a, b) == Ordering::Equal
}

impl From<ErrorValue> for Value {
    fn from(e: ErrorValue) -> Self {
        Value::Scalar(Scalar::Error(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(xs: &[f64]) -> Value {
        Value::Array(Array::column(xs.iter().map(|&x| Scalar::number(x)).collect()))
    }

    fn row(xs: &[f64]) -> Value {
        Value::Array(Array::row(xs.iter().map(|&x| Scalar::number(x)).collect()))
    }

    #[test]
    fn shapes() {
        assert_eq!(broadcast_shape(1, 12, 12, 1), (12, 12));
        assert_eq!(broadcast_shape(1, 1, 5, 3), (5, 3));
        assert_eq!(broadcast_shape(2, 1, 3, 1), (3, 1));
    }

    #[test]
    fn units_times_price() {
        let units = col(&[1.0, 1.0, 1.0, 4.0]);
        let price = col(&[712.0, 471.0, 570.0, 349.0]);
        assert_eq!(
            elementwise_binary(BinaryOp::Mul, &units, &price),
            col(&[712.0, 471.0, 570.0, 1396.0])
        );
    }

    #[test]
    fn outer_broadcast() {
        let out = elementwise_binary(BinaryOp::Add, &row(&[1.0, 2.0, 3.0]), &col(&[10.0, 20.0]));
        let expected = Array::from_rows(vec![
            vec![11.0.into(), 12.0.into(), 13.0.into()],
            vec![21.0.into(), 22.0.into(), 23.0.into()],
        ])
        .unwrap();
        assert_eq!(out, Value::Array(expected));
    }

    #[test]
    fn mismatched_lengths_fill_na() {
        let out = elementwise_binary(BinaryOp::Add, &col(&[1.0, 2.0]), &col(&[10.0, 20.0, 30.0]));
        assert_eq!(
            out.cells(),
            &[Scalar::number(11.0), Scalar::number(22.0), Scalar::error(ErrorKind::Na)]
        );
    }

    #[test]
    fn errors_and_coercions() {
        let div = apply_binary(BinaryOp::Div, &1.0.into(), &0.0.into());
        assert_eq!(div, Scalar::error(ErrorKind::Div0));
        let bad = apply_binary(BinaryOp::Mul, &"west".into(), &2.0.into());
        assert_eq!(bad, Scalar::error(ErrorKind::Value));
        let left = apply_binary(
            BinaryOp::Add,
            &Scalar::error(ErrorKind::Ref),
            &Scalar::error(ErrorKind::Name),
        );
        assert_eq!(left, Scalar::error(ErrorKind::Ref));
        assert_eq!(apply_binary(BinaryOp::Mul, &true.into(), &"3.5".into()), Scalar::number(3.5));
    }

    #[test]
    fn comparisons_order_types() {
        assert_eq!(apply_binary(BinaryOp::Lt, &9e9.into(), &"a".into()), Scalar::Bool(true));
        assert_eq!(apply_binary(BinaryOp::Lt, &"zzz".into(), &false.into()), Scalar::Bool(true));
        assert_eq!(apply_binary(BinaryOp::Eq, &"West".into(), &"wEST".into()), Scalar::Bool(true));
        assert_eq!(apply_binary(BinaryOp::Eq, &"1".into(), &1.0.into()), Scalar::Bool(false));
    }

    #[test]
    fn concat_uses_shortest_numbers() {
        assert_eq!(
            apply_binary(BinaryOp::Concat, &"x".into(), &0.1.into()),
            Scalar::text("x0.1")
        );
        assert_eq!(
            apply_binary(BinaryOp::Concat, &1396.0.into(), &true.into()),
            Scalar::text("1396TRUE")
        );
    }

    #[test]
    fn pow_edge_cases() {
        assert_eq!(apply_binary(BinaryOp::Pow, &0.0.into(), &0.0.into()), Scalar::error(ErrorKind::Num));
        assert_eq!(apply_binary(BinaryOp::Pow, &(-8.0).into(), &(1.0 / 3.0).into()), Scalar::error(ErrorKind::Num));
        assert_eq!(apply_binary(BinaryOp::Pow, &(-2.0).into(), &2.0.into()), Scalar::number(4.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn scalar() -> impl Strategy<Value = Scalar> {
            prop_oneof![
                (-1e6f64..1e6).prop_map(Scalar::number),
                "[a-c]{0,3}".prop_map(Scalar::Text),
                any::<bool>().prop_map(Scalar::Bool),
                Just(Scalar::error(ErrorKind::Na)),
            ]
        }

        fn array() -> impl Strategy<Value = Array> {
            (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
                proptest::collection::vec(scalar(), r * c).prop_map(move |v| Array::new(r, c, v))
            })
        }

        fn op() -> impl Strategy<Value = BinaryOp> {
            prop_oneof![
                Just(BinaryOp::Add),
                Just(BinaryOp::Sub),
                Just(BinaryOp::Mul),
                Just(BinaryOp::Div),
                Just(BinaryOp::Pow),
                Just(BinaryOp::Concat),
                Just(BinaryOp::Eq),
                Just(BinaryOp::Lt),
                Just(BinaryOp::Ge),
            ]
        }

        proptest! {
            #[test]
            fn scalar_operand_maps_cellwise(a in array(), s in scalar(), op in op()) {
                let out = elementwise_binary(op, &Value::Array(a.clone()), &Value::Scalar(s.clone()));
                let expected = a.map(|x| apply_binary(op, x, &s));
                prop_assert_eq!(out, Value::Array(expected));
            }

            #[test]
            fn broadcast_shape_is_symmetric(a in 1usize..50, b in 1usize..50, c in 1usize..50, d in 1usize..50) {
                prop_assert_eq!(broadcast_shape(a, b, c, d), broadcast_shape(c, d, a, b));
            }

            #[test]
            fn left_error_wins(a in array(), b in array(), op in op()) {
                let out = elementwise_binary(op, &Value::Array(a.clone()), &Value::Array(b.clone()));
                let (rows, cols) = out.dims();
                let (av, bv) = (Value::Array(a), Value::Array(b));
                for r in 0..rows {
                    for c in 0..cols {
                        let x = broadcast_get(&av, r, c);
                        let y = broadcast_get(&bv, r, c);
                        let cell = out.get(r, c).unwrap();
                        if let Scalar::Error(e) = &x {
                            prop_assert_eq!(cell, &Scalar::Error(e.clone()));
                        } else if let Scalar::Error(e) = &y {
                            prop_assert_eq!(cell, &Scalar::Error(e.clone()));
                        }
                    }
                }
            }
        }
    }
}
