//! Scalar and array values.
//!
//! Every cell computes a [`Value`]: either a single [`Scalar`] or a
//! rectangular [`Array`] of scalars. A 1×1 array and its sole scalar are
//! treated as the same value everywhere, including equality.

use std::fmt;

/// The kinds of error a cell can hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorKind {
    Spill,
    Name,
    Ref,
    Value,
    Na,
    Div0,
    Num,
    Calc,
    Circ,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 9] = [
        ErrorKind::Spill,
        ErrorKind::Name,
        ErrorKind::Ref,
        ErrorKind::Value,
        ErrorKind::Na,
        ErrorKind::Div0,
        ErrorKind::Num,
        ErrorKind::Calc,
        ErrorKind::Circ,
    ];

    /// Canonical rendering, e.g. `#DIV/0!`.
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Spill => "#SPILL!",
            ErrorKind::Name => "#NAME?",
            ErrorKind::Ref => "#REF!",
            ErrorKind::Value => "#VALUE!",
            ErrorKind::Na => "#N/A",
            ErrorKind::Div0 => "#DIV/0!",
            ErrorKind::Num => "#NUM!",
            ErrorKind::Calc => "#CALC!",
            ErrorKind::Circ => "#CIRC!",
        }
    }

    /// Parses a canonical rendering (case-insensitive).
    pub fn parse(text: &str) -> Option<ErrorKind> {
        ErrorKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(text))
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An error scalar with optional diagnostic text.
///
/// The detail never shows up in value dumps; `lint` prints it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ErrorValue {
    pub kind: ErrorKind,
    pub detail: Option<String>,
}

impl ErrorValue {
    pub fn new(kind: ErrorKind) -> Self {
        ErrorValue { kind, detail: None }
    }

    pub fn with_detail(kind: ErrorKind, detail: impl Into<String>) -> Self {
        ErrorValue {
            kind,
            detail: Some(detail.into()),
        }
    }
}

impl From<ErrorKind> for ErrorValue {
    fn from(kind: ErrorKind) -> Self {
        ErrorValue::new(kind)
    }
}

impl fmt::Display for ErrorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.as_str())
    }
}

/// A single cell value.
///
/// Build numbers through [`Scalar::number`] so that NaN and infinities become
/// `#NUM!` instead of leaking into the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Number(f64),
    Text(String),
    Bool(bool),
    Error(ErrorValue),
}

impl Scalar {
    pub fn number(n: f64) -> Scalar {
        if n.is_finite() {
            // normalise -0 so that dumps never print "-0"
            Scalar::Number(if n == 0.0 { 0.0 } else { n })
        } else {
            Scalar::Error(ErrorValue::new(ErrorKind::Num))
        }
    }

    pub fn text(s: impl Into<String>) -> Scalar {
        Scalar::Text(s.into())
    }

    pub fn error(kind: ErrorKind) -> Scalar {
        Scalar::Error(ErrorValue::new(kind))
    }

    /// What an empty cell reads as.
    pub fn empty() -> Scalar {
        Scalar::Text(String::new())
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Scalar::Error(_))
    }

    pub fn as_error(&self) -> Option<&ErrorValue> {
        match self {
            Scalar::Error(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Scalar::Number(n) => Some(*n),
            _ => None,
        }
    }

    /// Numeric coercion used by arithmetic operators.
    pub fn to_number(&self) -> Result<f64, ErrorValue> {
        coerce_to_number(self)
    }

    /// Text coercion used by `&`.
    pub fn to_text(&self) -> Result<String, ErrorValue> {
        match self {
            Scalar::Number(n) => Ok(format_number(*n)),
            Scalar::Text(s) => Ok(s.clone()),
            Scalar::Bool(b) => Ok(if *b { "TRUE" } else { "FALSE" }.to_string()),
            Scalar::Error(e) => Err(e.clone()),
        }
    }

    /// Truthiness used by `IF` and `AND`/`OR`.
    pub fn to_bool(&self) -> Result<bool, ErrorValue> {
        match self {
            Scalar::Bool(b) => Ok(*b),
            Scalar::Number(n) => Ok(*n != 0.0),
            Scalar::Text(s) if s.eq_ignore_ascii_case("TRUE") => Ok(true),
            Scalar::Text(s) if s.eq_ignore_ascii_case("FALSE") => Ok(false),
            Scalar::Text(_) => Err(ErrorValue::new(ErrorKind::Value)),
            Scalar::Error(e) => Err(e.clone()),
        }
    }
}

impl From<f64> for Scalar {
    fn from(n: f64) -> Self {
        Scalar::number(n)
    }
}

impl From<bool> for Scalar {
    fn from(b: bool) -> Self {
        Scalar::Bool(b)
    }
}

impl From<&str> for Scalar {
    fn from(s: &str) -> Self {
        Scalar::Text(s.to_string())
    }
}

impl From<String> for Scalar {
    fn from(s: String) -> Self {
        Scalar::Text(s)
    }
}

impl From<ErrorKind> for Scalar {
    fn from(kind: ErrorKind) -> Self {
        Scalar::error(kind)
    }
}

impl From<ErrorValue> for Scalar {
    fn from(e: ErrorValue) -> Self {
        Scalar::Error(e)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Number(n) => f.write_str(&format_number(*n)),
            Scalar::Text(s) => f.write_str(s),
            Scalar::Bool(true) => f.write_str("TRUE"),
            Scalar::Bool(false) => f.write_str("FALSE"),
            Scalar::Error(e) => write!(f, "{e}"),
        }
    }
}

/// Numbers pass through, booleans become 1/0, numeric-looking text is parsed
/// and the empty string reads as 0. Anything else is `#VALUE!`.
pub fn coerce_to_number(s: &Scalar) -> Result<f64, ErrorValue> {
    match s {
        Scalar::Number(n) => Ok(*n),
        Scalar::Bool(b) => Ok(if *b { 1.0 } else { 0.0 }),
        Scalar::Text(t) if t.is_empty() => Ok(0.0),
        Scalar::Text(t) => parse_number(t).ok_or_else(|| ErrorValue::new(ErrorKind::Value)),
        Scalar::Error(e) => Err(e.clone()),
    }
}

/// Parses decimal text such as `3.5`, `-12`, `.5` or `1e-3`.
///
/// Rejects the `inf`/`nan` spellings that `f64::from_str` would accept.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    let body = t.strip_prefix(['+', '-']).unwrap_or(t);
    let mut digits = 0;
    let mut seen_dot = false;
    let mut seen_exp = false;
    let mut chars = body.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '0'..='9' => digits += 1,
            '.' if !seen_dot && !seen_exp => seen_dot = true,
            'e' | 'E' if !seen_exp && digits > 0 => {
                seen_exp = true;
                if matches!(chars.peek(), Some('+' | '-')) {
                    chars.next();
                }
                if !matches!(chars.peek(), Some('0'..='9')) {
                    return None;
                }
            }
            _ => return None,
        }
    }
    if digits == 0 {
        return None;
    }
    t.parse::<f64>().ok().filter(|n| n.is_finite())
}

/// Shortest round-trip decimal rendering.
///
/// Integral values below 1e15 print without a fraction; very large or very
/// small magnitudes switch to exponent form (`1e21`, `2.5e-7`).
pub fn format_number(n: f64) -> String {
    if n == 0.0 {
        return "0".to_string();
    }
    let abs = n.abs();
    if (1e-5..1e15).contains(&abs) {
        format!("{n}")
    } else {
        format!("{n:e}")
    }
}

/// A rectangular, row-major block of scalars with at least one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Array {
    rows: usize,
    cols: usize,
    cells: Vec<Scalar>,
}

impl Array {
    /// # Panics
    ///
    /// Panics if either dimension is zero or `cells.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, cells: Vec<Scalar>) -> Array {
        assert!(rows >= 1 && cols >= 1, "array dimensions must be at least 1x1");
        assert_eq!(cells.len(), rows * cols, "array is not rectangular");
        Array { rows, cols, cells }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Array {
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                cells.push(f(r, c));
            }
        }
        Array::new(rows, cols, cells)
    }

    pub fn filled(rows: usize, cols: usize, value: Scalar) -> Array {
        Array::new(rows, cols, vec![value; rows * cols])
    }

    /// An n×1 column.
    pub fn column(cells: Vec<Scalar>) -> Array {
        let n = cells.len();
        Array::new(n, 1, cells)
    }

    /// A 1×n row.
    pub fn row(cells: Vec<Scalar>) -> Array {
        let n = cells.len();
        Array::new(1, n, cells)
    }

    /// Builds an array from nested rows. Returns `None` for ragged or empty
    /// input.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Option<Array> {
        let cols = rows.first()?.len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Array::new(n, cols, rows.into_iter().flatten().collect()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&Scalar> {
        if row < self.rows && col < self.cols {
            Some(&self.cells[row * self.cols + col])
        } else {
            None
        }
    }

    pub fn cells(&self) -> &[Scalar] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<Scalar> {
        self.cells
    }

    pub fn row_slice(&self, row: usize) -> &[Scalar] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[Scalar]> {
        self.cells.chunks(self.cols)
    }

    pub fn column_cells(&self, col: usize) -> impl Iterator<Item = &Scalar> {
        self.cells.iter().skip(col).step_by(self.cols)
    }

    pub fn transpose(&self) -> Array {
        Array::from_fn(self.cols, self.rows, |r, c| self.cells[c * self.cols + r].clone())
    }

    pub fn map(&self, mut f: impl FnMut(&Scalar) -> Scalar) -> Array {
        Array::new(self.rows, self.cols, self.cells.iter().map(&mut f).collect())
    }
}

/// What a cell computes.
#[derive(Debug, Clone)]
pub enum Value {
    Scalar(Scalar),
    Array(Array),
}

impl Value {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Value::Scalar(_) => (1, 1),
            Value::Array(a) => a.dims(),
        }
    }

    /// The sole scalar of a scalar or 1×1 array.
    pub fn as_scalar(&self) -> Option<&Scalar> {
        match self {
            Value::Scalar(s) => Some(s),
            Value::Array(a) if a.dims() == (1, 1) => a.get(0, 0),
            Value::Array(_) => None,
        }
    }

    /// Element at `(row, col)`; a scalar answers for `(0, 0)` only.
    pub fn get(&self, row: usize, col: usize) -> Option<&Scalar> {
        match self {
            Value::Scalar(s) if row == 0 && col == 0 => Some(s),
            Value::Scalar(_) => None,
            Value::Array(a) => a.get(row, col),
        }
    }

    /// The top-left element: what the anchor cell itself displays.
    pub fn top_left(&self) -> &Scalar {
        match self {
            Value::Scalar(s) => s,
            Value::Array(a) => &a.cells[0],
        }
    }

    pub fn cells(&self) -> &[Scalar] {
        match self {
            Value::Scalar(s) => std::slice::from_ref(s),
            Value::Array(a) => a.cells(),
        }
    }

    pub fn into_array(self) -> Array {
        match self {
            Value::Scalar(s) => Array::new(1, 1, vec![s]),
            Value::Array(a) => a,
        }
    }

    /// Collapses a 1×1 array to its scalar.
    pub fn normalized(self) -> Value {
        match self {
            Value::Array(a) if a.dims() == (1, 1) => {
                Value::Scalar(a.into_cells().pop().expect("1x1 array has a cell"))
            }
            v => v,
        }
    }

    pub fn error(kind: ErrorKind) -> Value {
        Value::Scalar(Scalar::error(kind))
    }

    pub fn as_error(&self) -> Option<&ErrorValue> {
        self.as_scalar().and_then(Scalar::as_error)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        self.dims() == other.dims() && self.cells() == other.cells()
    }
}

impl From<Scalar> for Value {
    fn from(s: Scalar) -> Self {
        Value::Scalar(s)
    }
}

impl From<Array> for Value {
    fn from(a: Array) -> Self {
        Value::Array(a)
    }
}

impl From<f64> for Value {
    fn from(n: f64) -> Self {
        Value::Scalar(Scalar::number(n))
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Scalar(Scalar::Bool(b))
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Scalar(Scalar::text(s))
    }
}

impl From<ErrorKind> for Value {
    fn from(kind: ErrorKind) -> Self {
        Value::error(kind)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(s) => write!(f, "{s}"),
            Value::Array(a) => {
                f.write_str("{")?;
                for (r, row) in a.iter_rows().enumerate() {
                    if r > 0 {
                        f.write_str(";")?;
                    }
                    for (c, cell) in row.iter().enumerate() {
                        if c > 0 {
                            f.write_str(",")?;
                        }
                        match cell {
                            Scalar::Text(t) => write!(f, "\"{}\"", t.replace('"', "\"\""))?,
                            other => write!(f, "{other}")?,
                        }
                    }
                }
                f.write_str("}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_renderings_are_canonical() {
        let rendered: Vec<_> = ErrorKind::ALL.iter().map(|k| k.as_str()).collect();
        assert_eq!(
            rendered,
            ["#SPILL!", "#NAME?", "#REF!", "#VALUE!", "#N/A", "#DIV/0!", "#NUM!", "#CALC!", "#CIRC!"]
        );
        for k in ErrorKind::ALL {
            assert_eq!(ErrorKind::parse(k.as_str()), Some(k));
        }
    }

    #[test]
    fn non_finite_numbers_become_num_errors() {
        assert_eq!(Scalar::number(f64::NAN), Scalar::error(ErrorKind::Num));
        assert_eq!(Scalar::number(f64::INFINITY), Scalar::error(ErrorKind::Num));
        assert_eq!(Scalar::number(-0.0), Scalar::Number(0.0));
    }

    #[test]
    fn coercion() {
        assert_eq!(coerce_to_number(&Scalar::Bool(true)), Ok(1.0));
        assert_eq!(coerce_to_number(&Scalar::text("3.5")), Ok(3.5));
        assert_eq!(
            coerce_to_number(&Scalar::text("west")),
            Err(ErrorValue::new(ErrorKind::Value))
        );
        assert_eq!(coerce_to_number(&Scalar::empty()), Ok(0.0));
        assert_eq!(
            coerce_to_number(&Scalar::error(ErrorKind::Ref)),
            Err(ErrorValue::new(ErrorKind::Ref))
        );
    }

    #[test]
    fn parse_number_rejects_words() {
        for bad in ["inf", "NaN", "infinity", "1e", ".", "-", "1.2.3", "e5", "0x10"] {
            assert_eq!(parse_number(bad), None, "{bad}");
        }
        assert_eq!(parse_number(" 12 "), Some(12.0));
        assert_eq!(parse_number(".5"), Some(0.5));
        assert_eq!(parse_number("-1E-3"), Some(-0.001));
    }

    #[test]
    fn number_formatting_round_trips() {
        for n in [1.0, 0.1, 1396.0, -2.5, 1e21, 2.5e-7, 123456789012345.0, 1e15, 1.0 / 3.0] {
            let s = format_number(n);
            assert_eq!(s.parse::<f64>().unwrap(), n, "{s}");
        }
        assert_eq!(format_number(712.0), "712");
        assert_eq!(format_number(1e21), "1e21");
    }

    #[test]
    fn one_by_one_array_equals_scalar() {
        let a = Value::Array(Array::new(1, 1, vec![Scalar::number(4.0)]));
        assert_eq!(a, Value::from(4.0));
        assert_eq!(a.as_scalar(), Some(&Scalar::Number(4.0)));
    }

    #[test]
    #[should_panic(expected = "not rectangular")]
    fn ragged_array_is_rejected() {
        Array::new(2, 2, vec![Scalar::number(1.0)]);
    }
}
