//! Formula language front end: tokens, syntax tree, canonical rendering and
//! reference extraction.

mod address;
mod ast;
mod lexer;
mod parser;
mod refs;

pub use address::{
    column_index, column_letters, is_plain_sheet_name, parse_a1, quote_sheet_name, CellAddress, A1,
    MAX_COLS, MAX_ROWS,
};
pub use ast::{render_formula, Expr, SpillTarget};
pub use lexer::{tokenize, LexError, Lexeme, Token};
pub use parser::{parse_formula, ParseError};
pub use refs::{extract_references, ReferenceSet};
