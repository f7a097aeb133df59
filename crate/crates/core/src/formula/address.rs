use std::fmt;

/// Rows in a sheet.
pub const MAX_ROWS: u32 = 1_048_576;
/// Columns in a sheet (`A` through `XFD`).
pub const MAX_COLS: u32 = 16_384;

/// An A1-style cell address as written in a formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellAddress {
    pub sheet: Option<String>,
    /// 1-based.
    pub row: u32,
    /// 1-based.
    pub col: u32,
    pub row_abs: bool,
    pub col_abs: bool,
}

impl CellAddress {
    pub fn new(row: u32, col: u32) -> Self {
        CellAddress {
            sheet: None,
            row,
            col,
            row_abs: false,
            col_abs: false,
        }
    }

    pub fn on_sheet(mut self, sheet: impl Into<String>) -> Self {
        self.sheet = Some(sheet.into());
        self
    }

    /// Parses `A1`, `$B$7`, `Sheet1!C3` or `'My Sheet'!C3`.
    pub fn parse(text: &str) -> Option<CellAddress> {
        let (sheet, cell) = match text.rfind('!') {
            Some(i) => (Some(parse_sheet_prefix(&text[..i])?), &text[i + 1..]),
            None => (None, text),
        };
        let a1 = parse_a1(cell)?;
        Some(CellAddress {
            sheet,
            row: a1.row,
            col: a1.col,
            row_abs: a1.row_abs,
            col_abs: a1.col_abs,
        })
    }

    /// The address without sheet or `$` markers, e.g. `J8`.
    pub fn a1(&self) -> String {
        format!("{}{}", column_letters(self.col), self.row)
    }
}

fn parse_sheet_prefix(text: &str) -> Option<String> {
    if let Some(inner) = text.strip_prefix('\'').and_then(|t| t.strip_suffix('\'')) {
        let mut out = String::new();
        let mut chars = inner.chars();
        while let Some(c) = chars.next() {
            if c == '\'' && chars.next() != Some('\'') {
                return None;
            }
            out.push(c);
        }
        (!out.is_empty()).then_some(out)
    } else if is_plain_sheet_name(text) {
        Some(text.to_string())
    } else {
        None
    }
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(sheet) = &self.sheet {
            write!(f, "{}!", quote_sheet_name(sheet))?;
        }
        if self.col_abs {
            f.write_str("$")?;
        }
        f.write_str(&column_letters(self.col))?;
        if self.row_abs {
            f.write_str("$")?;
        }
        write!(f, "{}", self.row)
    }
}

/// Parsed `$A$1` without a sheet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct A1 {
    pub row: u32,
    pub col: u32,
    pub row_abs: bool,
    pub col_abs: bool,
}

/// Parses a bare A1 reference within sheet bounds.
pub fn parse_a1(text: &str) -> Option<A1> {
    let (len, a1) = scan_a1(text)?;
    (len == text.len()).then_some(a1)
}

/// Scans an A1 reference at the start of `text`, returning its byte length.
pub(crate) fn scan_a1(text: &str) -> Option<(usize, A1)> {
    let b = text.as_bytes();
    let mut i = 0;
    let col_abs = b.first() == Some(&b'$');
    if col_abs {
        i += 1;
    }
    let letters_start = i;
    while i < b.len() && b[i].is_ascii_alphabetic() {
        i += 1;
    }
    let letters = &text[letters_start..i];
    if letters.is_empty() || letters.len() > 3 {
        return None;
    }
    let row_abs = b.get(i) == Some(&b'$');
    if row_abs {
        i += 1;
    }
    let digits_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let digits = &text[digits_start..i];
    if digits.is_empty() || digits.len() > 7 || digits.starts_with('0') {
        return None;
    }
    let col = column_index(letters)?;
    let row: u32 = digits.parse().ok()?;
    if row > MAX_ROWS {
        return None;
    }
    Some((
        i,
        A1 {
            row,
            col,
            row_abs,
            col_abs,
        },
    ))
}

/// `1 → "A"`, `27 → "AA"`, `16384 → "XFD"`.
pub fn column_letters(mut col: u32) -> String {
    let mut out = Vec::new();
    while col > 0 {
        let rem = (col - 1) % 26;
        out.push(b'A' + rem as u8);
        col = (col - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Inverse of [`column_letters`], case-insensitive, bounded by `XFD`.
pub fn column_index(letters: &str) -> Option<u32> {
    if letters.is_empty() || letters.len() > 3 {
        return None;
    }
    let mut col: u32 = 0;
    for c in letters.bytes() {
        if !c.is_ascii_alphabetic() {
            return None;
        }
        col = col * 26 + (c.to_ascii_uppercase() - b'A') as u32 + 1;
    }
    (col <= MAX_COLS).then_some(col)
}

/// Sheet names usable without quotes: identifier-shaped and not an address.
pub fn is_plain_sheet_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_alphabetic() || first == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '.')
        && parse_a1(name).is_none()
        && !name.eq_ignore_ascii_case("TRUE")
        && !name.eq_ignore_ascii_case("FALSE")
}

pub fn quote_sheet_name(name: &str) -> String {
    if is_plain_sheet_name(name) {
        name.to_string()
    } else {
        format!("'{}'", name.replace('\'', "''"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn letters() {
        assert_eq!(column_letters(1), "A");
        assert_eq!(column_letters(26), "Z");
        assert_eq!(column_letters(27), "AA");
        assert_eq!(column_letters(16384), "XFD");
        assert_eq!(column_index("xfd"), Some(16384));
        assert_eq!(column_index("XFE"), None);
    }

    #[test]
    fn column_letters_biject() {
        for col in 1..=MAX_COLS {
            assert_eq!(column_index(&column_letters(col)), Some(col));
        }
    }

    #[test]
    fn parse_and_display() {
        let a = CellAddress::parse("$J$8").unwrap();
        assert_eq!((a.row, a.col, a.row_abs, a.col_abs), (8, 10, true, true));
        assert_eq!(a.to_string(), "$J$8");
        let b = CellAddress::parse("'My Sheet'!B7").unwrap();
        assert_eq!(b.sheet.as_deref(), Some("My Sheet"));
        assert_eq!(b.to_string(), "'My Sheet'!B7");
        assert_eq!(CellAddress::parse("Sheet1!A1").unwrap().to_string(), "Sheet1!A1");
        assert!(CellAddress::parse("A0").is_none());
        assert!(CellAddress::parse("ZZZ!!").is_none());
        assert!(CellAddress::parse("A1048577").is_none());
    }

    proptest! {
        #[test]
        fn address_round_trip(row in 1u32..=MAX_ROWS, col in 1u32..=MAX_COLS, ra: bool, ca: bool) {
            let addr = CellAddress { sheet: None, row, col, row_abs: ra, col_abs: ca };
            prop_assert_eq!(CellAddress::parse(&addr.to_string()), Some(addr));
        }
    }
}
