use std::fmt;

use super::address::{scan_a1, A1};
use crate::value::parse_number;

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Ident(String),
    Address(A1),
    Number(f64),
    Text(String),
    Bool(bool),
    /// `'quoted sheet'` (only valid before `!`)
    SheetName(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Amp,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    LParen,
    RParen,
    Comma,
    LBracket,
    RBracket,
    Colon,
    Bang,
    Hash,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Token::Ident(name) => return write!(f, "identifier `{name}`"),
            Token::Address(_) => "cell address",
            Token::Number(_) => "number",
            Token::Text(_) => "string",
            Token::Bool(_) => "boolean",
            Token::SheetName(_) => "sheet name",
            Token::Plus => "`+`",
            Token::Minus => "`-`",
            Token::Star => "`*`",
            Token::Slash => "`/`",
            Token::Caret => "`^`",
            Token::Amp => "`&`",
            Token::Eq => "`=`",
            Token::Ne => "`<>`",
            Token::Lt => "`<`",
            Token::Le => "`<=`",
            Token::Gt => "`>`",
            Token::Ge => "`>=`",
            Token::LParen => "`(`",
            Token::RParen => "`)`",
            Token::Comma => "`,`",
            Token::LBracket => "`[`",
            Token::RBracket => "`]`",
            Token::Colon => "`:`",
            Token::Bang => "`!`",
            Token::Hash => "`#`",
        };
        f.write_str(s)
    }
}

/// A token with the byte offset where it starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexeme {
    pub token: Token,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unexpected {found} at offset {offset}")]
pub struct LexError {
    pub offset: usize,
    pub found: String,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.'
}

/// Splits a formula body (without the leading `=`) into tokens.
pub fn tokenize(text: &str) -> Result<Vec<Lexeme>, LexError> {
    Lexer { text, pos: 0 }.run()
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl Lexer<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn next_significant(&self, from: usize) -> Option<char> {
        self.text[from..].chars().find(|c| !c.is_whitespace())
    }

    fn error(&self, offset: usize) -> LexError {
        let found = match self.text[offset..].chars().next() {
            Some(c) => format!("character `{c}`"),
            None => "end of input".to_string(),
        };
        LexError { offset, found }
    }

    fn run(mut self) -> Result<Vec<Lexeme>, LexError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.pos += c.len_utf8();
                continue;
            }
            let simple = match c {
                '+' => Some(Token::Plus),
                '-' => Some(Token::Minus),
                '*' => Some(Token::Star),
                '/' => Some(Token::Slash),
                '^' => Some(Token::Caret),
                '&' => Some(Token::Amp),
                '=' => Some(Token::Eq),
                '(' => Some(Token::LParen),
                ')' => Some(Token::RParen),
                ',' => Some(Token::Comma),
                ':' => Some(Token::Colon),
                '!' => Some(Token::Bang),
                '#' => Some(Token::Hash),
                ']' => Some(Token::RBracket),
                _ => None,
            };
            if let Some(token) = simple {
                self.pos += 1;
                out.push(Lexeme { token, offset: start });
                continue;
            }
            let token = match c {
                '<' | '>' => self.comparison(c),
                '"' => self.quoted('"', start).map(Token::Text)?,
                '\'' => self.quoted('\'', start).map(Token::SheetName)?,
                '[' => {
                    self.pos += 1;
                    out.push(Lexeme {
                        token: Token::LBracket,
                        offset: start,
                    });
                    let body_start = self.pos;
                    let Some(len) = self.rest().find(']') else {
                        return Err(self.error(self.text.len()));
                    };
                    self.pos += len;
                    out.push(Lexeme {
                        token: Token::Ident(self.text[body_start..self.pos].to_string()),
                        offset: body_start,
                    });
                    continue;
                }
                '0'..='9' | '.' => self.number(start)?,
                '$' => match self.address() {
                    Some(token) => token,
                    None => return Err(self.error(start)),
                },
                c if c.is_alphabetic() || c == '_' => match self.address() {
                    Some(token) => token,
                    None => self.word(),
                },
                _ => return Err(self.error(start)),
            };
            out.push(Lexeme { token, offset: start });
        }
        Ok(out)
    }

    fn comparison(&mut self, first: char) -> Token {
        self.pos += 1;
        let token = match (first, self.peek()) {
            ('<', Some('>')) => Token::Ne,
            ('<', Some('=')) => Token::Le,
            ('>', Some('=')) => Token::Ge,
            ('<', _) => return Token::Lt,
            _ => return Token::Gt,
        };
        self.pos += 1;
        token
    }

    fn quoted(&mut self, quote: char, start: usize) -> Result<String, LexError> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(LexError {
                    offset: start,
                    found: "unterminated quote".to_string(),
                });
            };
            self.pos += c.len_utf8();
            if c == quote {
                if self.peek() == Some(quote) {
                    self.pos += 1;
                    out.push(quote);
                } else {
                    return Ok(out);
                }
            } else {
                out.push(c);
            }
        }
    }

    fn number(&mut self, start: usize) -> Result<Token, LexError> {
        let b = self.rest().as_bytes();
        let mut i = 0;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i < b.len() && b[i] == b'.' {
            i += 1;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            let mut j = i + 1;
            if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                j += 1;
            }
            if j < b.len() && b[j].is_ascii_digit() {
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.rest()[..i];
        match parse_number(text) {
            Some(n) => {
                self.pos += i;
                Ok(Token::Number(n))
            }
            None => Err(self.error(start)),
        }
    }

    /// An A1 address, unless the word continues or is followed by `(`, `[`
    /// or `!` (function names such as `LOG10`, tables, sheet prefixes).
    fn address(&mut self) -> Option<Token> {
        let (len, a1) = scan_a1(self.rest())?;
        let end = self.pos + len;
        if self.text[end..].chars().next().is_some_and(is_word_char) {
            return None;
        }
        let has_dollar = self.rest()[..len].contains('$');
        if !has_dollar && matches!(self.next_significant(end), Some('(' | '[' | '!')) {
            return None;
        }
        self.pos = end;
        Some(Token::Address(a1))
    }

    fn word(&mut self) -> Token {
        let len = self
            .rest()
            .char_indices()
            .find(|&(_, c)| !is_word_char(c))
            .map_or(self.rest().len(), |(i, _)| i);
        let word = self.rest()[..len].to_string();
        self.pos += len;
        let before_paren = self.next_significant(self.pos) == Some('(');
        if !before_paren && word.eq_ignore_ascii_case("TRUE") {
            Token::Bool(true)
        } else if !before_paren && word.eq_ignore_ascii_case("FALSE") {
            Token::Bool(false)
        } else {
            Token::Ident(word)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(text: &str) -> Vec<Token> {
        tokenize(text).unwrap().into_iter().map(|l| l.token).collect()
    }

    fn addr(col: u32, row: u32) -> Token {
        Token::Address(A1 {
            row,
            col,
            row_abs: false,
            col_abs: false,
        })
    }

    fn ident(s: &str) -> Token {
        Token::Ident(s.to_string())
    }

    #[test]
    fn sum_range() {
        assert_eq!(
            tokens("SUM(A1:B2)"),
            [ident("SUM"), Token::LParen, addr(1, 1), Token::Colon, addr(2, 2), Token::RParen]
        );
    }

    #[test]
    fn structured_references() {
        assert_eq!(
            tokens("Sales[units]*Sales[price]"),
            [
                ident("Sales"),
                Token::LBracket,
                ident("units"),
                Token::RBracket,
                Token::Star,
                ident("Sales"),
                Token::LBracket,
                ident("price"),
                Token::RBracket
            ]
        );
    }

    #[test]
    fn spill_operator() {
        assert_eq!(tokens("demand#"), [ident("demand"), Token::Hash]);
        assert_eq!(tokens("maximum.production#"), [ident("maximum.production"), Token::Hash]);
    }

    #[test]
    fn words_that_look_like_addresses() {
        assert_eq!(tokens("LOG10(1)")[0], ident("LOG10"));
        assert_eq!(tokens("T1[x]")[0], ident("T1"));
        assert_eq!(tokens("S1!A1")[..2], [ident("S1"), Token::Bang]);
        assert_eq!(tokens("ZZZ1"), [ident("ZZZ1")]);
        assert_eq!(tokens("A1.x"), [ident("A1.x")]);
        assert_eq!(tokens("true"), [Token::Bool(true)]);
    }

    #[test]
    fn operators_and_literals() {
        assert_eq!(
            tokens("1.5e3<>\"a\"\"b\"<=2"),
            [
                Token::Number(1500.0),
                Token::Ne,
                Token::Text("a\"b".into()),
                Token::Le,
                Token::Number(2.0)
            ]
        );
        assert_eq!(tokens("'My Sheet'!$A$1")[0], Token::SheetName("My Sheet".into()));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(tokenize("1 + ?").unwrap_err().offset, 4);
        assert_eq!(tokenize("\"open").unwrap_err().offset, 0);
        assert_eq!(tokenize("$x").unwrap_err().offset, 0);
        assert!(tokenize("Sales[units").is_err());
    }
}
