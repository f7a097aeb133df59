use std::fmt;

use super::address::CellAddress;
use crate::ops::{BinaryOp, UnaryOp};
use crate::value::format_number;

/// Parsed formula.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Text(String),
    Bool(bool),
    Cell(CellAddress),
    /// Corners as written; the end address never carries a sheet.
    Range(CellAddress, CellAddress),
    Name(String),
    /// `target#`
    Spill(SpillTarget),
    TableColumn {
        table: String,
        column: String,
    },
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Function name is stored uppercase.
    Call(String, Vec<Expr>),
}

/// What a `#` postfix can be attached to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpillTarget {
    Cell(CellAddress),
    Name(String),
}

impl fmt::Display for SpillTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpillTarget::Cell(a) => write!(f, "{a}"),
            SpillTarget::Name(n) => f.write_str(n),
        }
    }
}

const UNARY_PRECEDENCE: u8 = 6;
const POSTFIX_PRECEDENCE: u8 = 7;
const ATOM_PRECEDENCE: u8 = 8;

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Expr {
        Expr::Unary(op, Box::new(operand))
    }

    pub fn call(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Call(name.to_ascii_uppercase(), args)
    }

    pub fn name(name: &str) -> Expr {
        Expr::Name(name.to_string())
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Unary(..) => UNARY_PRECEDENCE,
            Expr::Spill(_) => POSTFIX_PRECEDENCE,
            _ => ATOM_PRECEDENCE,
        }
    }

    /// Calls `f` on this node and every descendant, parents first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Unary(_, e) => e.walk(f),
            Expr::Binary(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.walk(f)),
            _ => {}
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical text: uppercase function names, no spaces, and only the
/// parentheses needed to keep evaluation order.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(n) => f.write_str(&format_number(*n)),
            Expr::Text(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Expr::Bool(true) => f.write_str("TRUE"),
            Expr::Bool(false) => f.write_str("FALSE"),
            Expr::Cell(a) => write!(f, "{a}"),
            Expr::Range(a, b) => write!(f, "{a}:{b}"),
            Expr::Name(n) => f.write_str(n),
            Expr::Spill(t) => write!(f, "{t}#"),
            Expr::TableColumn { table, column } => write!(f, "{table}[{column}]"),
            Expr::Unary(op, e) => {
                f.write_str(op.symbol())?;
                write_operand(f, e, e.precedence() < UNARY_PRECEDENCE)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                write_operand(f, l, l.precedence() < p)?;
                f.write_str(op.symbol())?;
                write_operand(f, r, r.precedence() <= p)
            }
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Renders an expression back to canonical formula text (without `=`).
pub fn render_formula(expr: &Expr) -> String {
    expr.to_string()
}
