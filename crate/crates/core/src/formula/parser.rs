//! Recursive-descent parser.
//!
//! ```text
//! expr       := comparison
//! comparison := concat (("=" | "<>" | "<" | "<=" | ">" | ">=") concat)*
//! concat     := additive ("&" additive)*
//! additive   := term (("+" | "-") term)*
//! term       := power (("*" | "/") power)*
//! power      := unary ("^" unary)*
//! unary      := ("-" | "+") unary | postfix
//! postfix    := primary "#"?
//! primary    := NUMBER | STRING | BOOL | "(" expr ")"
//!             | [sheet "!"] ADDRESS (":" ADDRESS)?
//!             | IDENT "(" [expr ("," expr)*] ")"
//!             | IDENT "[" COLUMN "]"
//!             | IDENT
//! ```

use super::address::CellAddress;
use super::ast::{Expr, SpillTarget};
use super::lexer::{tokenize, LexError, Lexeme, Token};
use crate::ops::{BinaryOp, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError {
            offset: e.offset,
            message: format!("unexpected {}", e.found),
        }
    }
}

/// Parses a formula body. A single leading `=` is accepted and ignored.
pub fn parse_formula(text: &str) -> Result<Expr, ParseError> {
    let (body, shift) = match text.strip_prefix('=') {
        Some(rest) => (rest, 1),
        None => (text, 0),
    };
    let tokens = tokenize(body).map_err(|e| {
        let mut e = ParseError::from(e);
        e.offset += shift;
        e
    })?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        end: body.len(),
    };
    let expr = p.expr().map_err(|mut e| {
        e.offset += shift;
        e
    })?;
    if let Some(lx) = p.tokens.get(p.pos) {
        return Err(ParseError {
            offset: lx.offset + shift,
            message: format!("expected end of formula, found {}", lx.token),
        });
    }
    Ok(expr)
}

struct Parser<'t> {
    tokens: &'t [Lexeme],
    pos: usize,
    end: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|l| &l.token)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.tokens.get(self.pos + n).map(|l| &l.token)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |l| l.offset)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos).map(|l| &l.token);
        self.pos += 1;
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of formula".to_string(),
        };
        ParseError {
            offset: self.offset(),
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expect(&mut self, token: Token, expected: &str) -> PResult<()> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.comparison()
    }

    fn binary_level(
        &mut self,
        next: fn(&mut Self) -> PResult<Expr>,
        op_for: fn(&Token) -> Option<BinaryOp>,
    ) -> PResult<Expr> {
        let mut lhs = next(self)?;
        while let Some(op) = self.peek().and_then(op_for) {
            self.pos += 1;
            let rhs = next(self)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> PResult<Expr> {
        self.binary_level(Self::concat, |t| match t {
            Token::Eq => Some(BinaryOp::Eq),
            Token::Ne => Some(BinaryOp::Ne),
            Token::Lt => Some(BinaryOp::Lt),
            Token::Le => Some(BinaryOp::Le),
            Token::Gt => Some(BinaryOp::Gt),
            Token::Ge => Some(BinaryOp::Ge),
            _ => None,
        })
    }

    fn concat(&mut self) -> PResult<Expr> {
        self.binary_level(Self::additive, |t| (t == &Token::Amp).then_some(BinaryOp::Concat))
    }

    fn additive(&mut self) -> PResult<Expr> {
        self.binary_level(Self::term, |t| match t {
            Token::Plus => Some(BinaryOp::Add),
            Token::Minus => Some(BinaryOp::Sub),
            _ => None,
        })
    }

    fn term(&mut self) -> PResult<Expr> {
        self.binary_level(Self::power, |t| match t {
            Token::Star => Some(BinaryOp::Mul),
            Token::Slash => Some(BinaryOp::Div),
            _ => None,
        })
    }

    fn power(&mut self) -> PResult<Expr> {
        self.binary_level(Self::unary, |t| (t == &Token::Caret).then_some(BinaryOp::Pow))
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Some(Token::Minus) => UnaryOp::Neg,
            Some(Token::Plus) => UnaryOp::Plus,
            _ => return self.postfix(),
        };
        self.pos += 1;
        Ok(Expr::unary(op, self.unary()?))
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let grouped = self.peek() == Some(&Token::LParen);
        let expr = self.primary()?;
        if self.peek() != Some(&Token::Hash) {
            return Ok(expr);
        }
        let target = match expr {
            Expr::Cell(a) if !grouped => SpillTarget::Cell(a),
            Expr::Name(n) if !grouped => SpillTarget::Name(n),
            _ => {
                return Err(ParseError {
                    offset: self.offset(),
                    message: "`#` must follow a cell reference or a name".to_string(),
                })
            }
        };
        self.pos += 1;
        Ok(Expr::Spill(target))
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(token) = self.peek().cloned() else {
            return Err(self.error("an expression"));
        };
        match token {
            Token::Number(n) => {
                self.pos += 1;
                Ok(Expr::Number(n))
            }
            Token::Text(s) => {
                self.pos += 1;
                Ok(Expr::Text(s))
            }
            Token::Bool(b) => {
                self.pos += 1;
                Ok(Expr::Bool(b))
            }
            Token::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(e)
            }
            Token::Address(_) => self.reference(None),
            Token::SheetName(name) => {
                self.pos += 1;
                self.expect(Token::Bang, "`!` after sheet name")?;
                self.reference(Some(name))
            }
            Token::Ident(name) => match self.peek_at(1) {
                Some(Token::Bang) => {
                    self.pos += 2;
                    self.reference(Some(name))
                }
                Some(Token::LParen) => self.call(name),
                Some(Token::LBracket) => self.table_column(name),
                _ => {
                    self.pos += 1;
                    Ok(Expr::Name(name))
                }
            },
            _ => Err(self.error("an expression")),
        }
    }

    fn address(&mut self, sheet: Option<String>) -> PResult<CellAddress> {
        match self.peek() {
            Some(Token::Address(a1)) => {
                let a1 = *a1;
                self.pos += 1;
                Ok(CellAddress {
                    sheet,
                    row: a1.row,
                    col: a1.col,
                    row_abs: a1.row_abs,
                    col_abs: a1.col_abs,
                })
            }
            _ => Err(self.error("a cell address")),
        }
    }

    fn reference(&mut self, sheet: Option<String>) -> PResult<Expr> {
        let start = self.address(sheet)?;
        if self.peek() != Some(&Token::Colon) {
            return Ok(Expr::Cell(start));
        }
        self.pos += 1;
        let end = self.address(None)?;
        Ok(Expr::Range(start, end))
    }

    fn call(&mut self, name: String) -> PResult<Expr> {
        self.pos += 2;
        let mut args = Vec::new();
        if self.peek() == Some(&Token::RParen) {
            self.pos += 1;
            return Ok(Expr::call(&name, args));
        }
        loop {
            args.push(self.expr()?);
            match self.bump() {
                Some(Token::Comma) => continue,
                Some(Token::RParen) => break,
                _ => {
                    self.pos -= 1;
                    return Err(self.error("`,` or `)`"));
                }
            }
        }
        Ok(Expr::call(&name, args))
    }

    fn table_column(&mut self, table: String) -> PResult<Expr> {
        self.pos += 2;
        let offset = self.offset();
        let column = match self.bump() {
            Some(Token::Ident(c)) => c.trim().to_string(),
            _ => {
                self.pos -= 1;
                return Err(self.error("a column name"));
            }
        };
        if column.is_empty() || column.starts_with(['#', '@', '[']) {
            return Err(ParseError {
                offset,
                message: format!("unsupported structured reference `[{column}]`"),
            });
        }
        self.expect(Token::RBracket, "`]`")?;
        Ok(Expr::TableColumn { table, column })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> Expr {
        parse_formula(text).unwrap_or_else(|e| panic!("{text}: {e}"))
    }

    fn n(x: f64) -> Expr {
        Expr::Number(x)
    }

    #[test]
    fn escalation_formula() {
        let expected = Expr::binary(
            BinaryOp::Mul,
            Expr::call(
                "IF",
                vec![
                    Expr::name("isEscalated"),
                    Expr::binary(
                        BinaryOp::Pow,
                        Expr::binary(BinaryOp::Add, n(1.0), Expr::name("price.escalationPerPeriod")),
                        Expr::name("p"),
                    ),
                    n(1.0),
                ],
            ),
            Expr::name("price.initial"),
        );
        assert_eq!(
            p("IF(isEscalated,(1+price.escalationPerPeriod)^p,1)*price.initial"),
            expected
        );
    }

    #[test]
    fn unary_minus_binds_tighter_than_power() {
        assert_eq!(
            p("-2^2"),
            Expr::binary(BinaryOp::Pow, Expr::unary(UnaryOp::Neg, n(2.0)), n(2.0))
        );
        assert_eq!(
            p("2^3^2"),
            Expr::binary(BinaryOp::Pow, Expr::binary(BinaryOp::Pow, n(2.0), n(3.0)), n(2.0))
        );
    }

    #[test]
    fn accumulation_matrix() {
        let seq = |a: f64, b: f64| Expr::call("SEQUENCE", vec![n(a), n(b)]);
        assert_eq!(
            p("SIGN(SEQUENCE(1,12)<SEQUENCE(12,1))"),
            Expr::call("SIGN", vec![Expr::binary(BinaryOp::Lt, seq(1.0, 12.0), seq(12.0, 1.0))])
        );
    }

    #[test]
    fn precedence_ladder() {
        // comparisons < & < +- < */ < ^
        assert_eq!(p("1+2*3^2&\"x\"=\"7x\"").to_string(), "1+2*3^2&\"x\"=\"7x\"");
        assert_eq!(
            p("1+2&3"),
            Expr::binary(BinaryOp::Concat, Expr::binary(BinaryOp::Add, n(1.0), n(2.0)), n(3.0))
        );
        assert_eq!(
            p("1=2&3"),
            Expr::binary(BinaryOp::Eq, n(1.0), Expr::binary(BinaryOp::Concat, n(2.0), n(3.0)))
        );
    }

    #[test]
    fn references() {
        assert_eq!(
            p("Sheet2!A1:B3"),
            Expr::Range(
                CellAddress::new(1, 1).on_sheet("Sheet2"),
                CellAddress::new(3, 2)
            )
        );
        assert_eq!(
            p("'My Sheet'!C3#"),
            Expr::Spill(SpillTarget::Cell(CellAddress::new(3, 3).on_sheet("My Sheet")))
        );
        assert_eq!(
            p("Sales[unit price]"),
            Expr::TableColumn {
                table: "Sales".into(),
                column: "unit price".into()
            }
        );
        assert_eq!(p("demand#"), Expr::Spill(SpillTarget::Name("demand".into())));
    }

    #[test]
    fn function_names_are_uppercased() {
        assert_eq!(p("sum( a1 , 2 )").to_string(), "SUM(A1,2)");
        assert_eq!(p("=Rows()"), Expr::Call("ROWS".into(), vec![]));
    }

    #[test]
    fn rejected_forms() {
        for bad in [
            "A1:B2#",
            "(A1)#",
            "SUM(A1)#",
            "demand##",
            "Sales[#All]",
            "Sales[@units]",
            "Sales[]",
            "1 2",
            "SUM(1,",
            "SUM(1 2)",
            "",
            "Sheet1!foo",
            "A1:",
            "(1",
        ] {
            assert!(parse_formula(bad).is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn error_offsets_point_at_the_problem() {
        let e = parse_formula("=1+)").unwrap_err();
        assert_eq!(e.offset, 3);
        assert!(e.message.contains("expected an expression"), "{}", e.message);
        assert_eq!(parse_formula("A1:B2#").unwrap_err().offset, 5);
        assert_eq!(parse_formula("1 2").unwrap_err().offset, 2);
    }

    #[test]
    fn render_keeps_needed_parentheses() {
        for text in [
            "(1+2)*3",
            "1-(2-3)",
            "1-2-3",
            "-(2^2)",
            "-2^2",
            "2^(3^2)",
            "1<2=TRUE",
            "1<(2=TRUE)",
            "--A1",
            "1/(2*3)",
            "IF(demand<initialCapacity#,demand#,initialCapacity#)",
            "TRANSPOSE(UNIQUE(Sales[goods]))",
        ] {
            assert_eq!(p(text).to_string(), text);
        }
        assert_eq!(p("((1))+(2*3)").to_string(), "1+2*3");
    }
}
