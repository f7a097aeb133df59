use std::collections::HashMap;

use super::{cells_arg, scalar_arg, Arg, GridInfo};
use crate::ops::{broadcast_get, broadcast_shape, text_eq};
use crate::value::{parse_number, Array, ErrorKind, ErrorValue, Scalar, Value};

fn bool_text(b: bool) -> &'static str {
    if b {
        "TRUE"
    } else {
        "FALSE"
    }
}

/// Literal equality test used by `SUMIFS`.
///
/// Both sides are compared as numbers when both read as numbers, otherwise
/// as case-insensitive text. Error cells never match.
pub fn criterion_matches(cell: &Scalar, criterion: &Scalar) -> bool {
    let as_num = |s: &Scalar| match s {
        Scalar::Number(n) => Some(*n),
        Scalar::Text(t) => parse_number(t),
        _ => None,
    };
    match (cell, criterion) {
        (Scalar::Error(_), _) | (_, Scalar::Error(_)) => false,
        (Scalar::Bool(a), Scalar::Bool(b)) => a == b,
        _ => match (as_num(cell), as_num(criterion)) {
            (Some(a), Some(b)) => a == b,
            (Some(_), None) | (None, Some(_)) => false,
            (None, None) => {
                let text = |s: &Scalar| match s {
                    Scalar::Text(t) => t.clone(),
                    Scalar::Bool(b) => bool_text(*b).to_string(),
                    _ => String::new(),
                };
                text_eq(&text(cell), &text(criterion))
            }
        },
    }
}

pub(super) fn sumifs(args: &[&Arg], _: &dyn GridInfo) -> Value {
    if args.len().is_multiple_of(2) {
        return Value::error(ErrorKind::Value);
    }
    let Some(sum_range) = cells_arg(args[0]) else {
        return Value::error(ErrorKind::Value);
    };
    let n = sum_range.len();
    let mut pairs = Vec::with_capacity(args.len() / 2);
    for pair in args[1..].chunks(2) {
        let Some(range) = cells_arg(pair[0]) else {
            return Value::error(ErrorKind::Value);
        };
        if range.len() != n {
            return Value::error(ErrorKind::Value);
        }
        let criterion = scalar_arg(pair[1]);
        if let Scalar::Error(e) = criterion {
            return e.into();
        }
        pairs.push((range, criterion));
    }
    let mut total = 0.0;
    for (i, cell) in sum_range.iter().enumerate() {
        if !pairs.iter().all(|(range, crit)| criterion_matches(&range[i], crit)) {
            continue;
        }
        match cell {
            Scalar::Number(x) => total += x,
            Scalar::Error(e) => return e.clone().into(),
            _ => {}
        }
    }
    Value::Scalar(Scalar::number(total))
}

/// Hashable form of a scalar under `criterion_matches`: two non-error
/// scalars match exactly when their keys are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum MatchKey {
    Num(u64),
    Text(String),
}

fn match_key(s: &Scalar) -> Option<MatchKey> {
    let num = |n: f64| MatchKey::Num(if n == 0.0 { 0 } else { n.to_bits() });
    let text = |t: &str| {
        MatchKey::Text(if t.is_ascii() {
            t.to_ascii_lowercase()
        } else {
            t.chars().flat_map(char::to_lowercase).collect()
        })
    };
    match s {
        Scalar::Error(_) => None,
        Scalar::Number(n) => Some(num(*n)),
        Scalar::Text(t) => Some(parse_number(t).map_or_else(|| text(t), num)),
        Scalar::Bool(b) => Some(text(bool_text(*b))),
    }
}

/// `SUMIFS` over arrays of criteria: groups the sum range by criteria keys
/// once, then looks each result cell up.
pub(super) fn sumifs_lifted(args: &[&Arg]) -> Option<Value> {
    if args.len().is_multiple_of(2) {
        return None;
    }
    let sum_range = cells_arg(args[0])?;
    let mut ranges = Vec::new();
    let mut criteria = Vec::new();
    for pair in args[1..].chunks(2) {
        let range = cells_arg(pair[0]).filter(|r| r.len() == sum_range.len())?;
        let Arg::Value(criterion) = pair[1] else {
            return None;
        };
        ranges.push(range);
        criteria.push(criterion);
    }

    let mut groups: HashMap<Vec<MatchKey>, Result<f64, ErrorValue>> = HashMap::new();
    'rows: for (i, cell) in sum_range.iter().enumerate() {
        let mut key = Vec::with_capacity(ranges.len());
        for range in &ranges {
            match match_key(&range[i]) {
                Some(k) => key.push(k),
                None => continue 'rows,
            }
        }
        let acc = groups.entry(key).or_insert(Ok(0.0));
        match (acc.as_mut(), cell) {
            (Ok(total), Scalar::Number(x)) => *total += x,
            (Ok(_), Scalar::Error(e)) => *acc = Err(e.clone()),
            _ => {}
        }
    }

    let (rows, cols) = criteria.iter().fold((1, 1), |(r, c), v| {
        let (vr, vc) = v.dims();
        broadcast_shape(r, c, vr, vc)
    });
    Some(Value::Array(Array::from_fn(rows, cols, |r, c| {
        let mut key = Vec::with_capacity(criteria.len());
        for v in &criteria {
            match broadcast_get(v, r, c) {
                Scalar::Error(e) => return Scalar::Error(e),
                s => key.push(match_key(&s).expect("not an error")),
            }
        }
        match groups.get(&key) {
            Some(Ok(total)) => Scalar::number(*total),
            Some(Err(e)) => Scalar::Error(e.clone()),
            None => Scalar::number(0.0),
        }
    })))
}
