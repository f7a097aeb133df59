use super::{int_arg, scalar_arg, Arg, GridInfo};
use crate::date::{DateSerial, MAX_SERIAL};
use crate::value::{ErrorKind, Scalar, Value};

pub(super) fn sign(args: &[&Arg], _: &dyn GridInfo) -> Value {
    match scalar_arg(args[0]).to_number() {
        Ok(n) if n > 0.0 => Value::from(1.0),
        Ok(n) if n < 0.0 => Value::from(-1.0),
        Ok(_) => Value::from(0.0),
        Err(e) => e.into(),
    }
}

pub(super) fn if_(args: &[&Arg], _: &dyn GridInfo) -> Value {
    let cond = match scalar_arg(args[0]).to_bool() {
        Ok(b) => b,
        Err(e) => return e.into(),
    };
    let pick = if cond { args.get(1) } else { args.get(2) };
    match pick {
        Some(Arg::Value(v)) => v.clone(),
        Some(_) => Value::error(ErrorKind::Value),
        None => Value::from(false),
    }
}

pub(super) fn eomonth(args: &[&Arg], _: &dyn GridInfo) -> Value {
    let start = match int_arg(args[0]) {
        Ok(s) => s,
        Err(e) => return e.into(),
    };
    let months = match int_arg(args[1]) {
        Ok(m) => m,
        Err(e) => return e.into(),
    };
    if !(0..=MAX_SERIAL).contains(&start) {
        return Value::error(ErrorKind::Num);
    }
    match DateSerial(start).end_of_month(months) {
        Some(d) if (0..=MAX_SERIAL).contains(&d.serial()) => Value::Scalar(Scalar::number(d.serial() as f64)),
        _ => Value::error(ErrorKind::Num),
    }
}
