//! Syntax of the clue language.
//!
//! ```text
//! expr    := and ("or" and)*
//! and     := cmp ("and" cmp)*
//! cmp     := sum (("==" | "!=" | "<" | ">") sum)?
//! sum     := term (("+" | "-") term)*
//! term    := INT | STRING
//!          | "r" "(" lit ")"            row number of an attribute (header row is 0)
//!          | "c" "(" lit ")"            column of a category or attribute (0-based)
//!          | "T" "(" sum "," sum ")"    content of a cell
//!          | "either_or" "(" expr "," expr ")"              exactly one holds
//!          | "one_other" "(" pair "," pair ")"
//!          | "(" expr ")"
//! pair    := "(" lit "," lit ")"
//! lit     := INT | STRING
//! STRING  := '...' | "..."
//! ```
//!
//! `one_other((x, y), (p, q))` reads "of x and y, one is p and the other
//! is q" and means `(r(x) == r(p) and r(y) == r(q))` exclusive-or
//! `(r(x) == r(q) and r(y) == r(p))`.

use std::fmt;

use crate::error::{Error, Result};
use crate::pylit;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Lit {
    Int(i64),
    Str(String),
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lit::Int(v) => write!(f, "{v}"),
            Lit::Str(s) => f.write_str(&pylit::quote(s)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Gt,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClueExpr {
    Lit(Lit),
    Row(Lit),
    Col(Lit),
    Cell(Box<ClueExpr>, Box<ClueExpr>),
    Arith(ArithOp, Box<ClueExpr>, Box<ClueExpr>),
    Cmp(CmpOp, Box<ClueExpr>, Box<ClueExpr>),
    And(Box<ClueExpr>, Box<ClueExpr>),
    Or(Box<ClueExpr>, Box<ClueExpr>),
    EitherOr(Box<ClueExpr>, Box<ClueExpr>),
    OneOther([Lit; 2], [Lit; 2]),
}

impl ClueExpr {
    fn prec(&self) -> u8 {
        match self {
            ClueExpr::Or(..) => 1,
            ClueExpr::And(..) => 2,
            ClueExpr::Cmp(..) => 3,
            ClueExpr::Arith(..) => 4,
            _ => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            ClueExpr::Lit(l) => write!(f, "{l}")?,
            ClueExpr::Row(l) => write!(f, "r({l})")?,
            ClueExpr::Col(l) => write!(f, "c({l})")?,
            ClueExpr::Cell(a, b) => {
                f.write_str("T(")?;
                a.write(f, 4)?;
                f.write_str(", ")?;
                b.write(f, 4)?;
                f.write_str(")")?;
            }
            ClueExpr::Arith(op, a, b) => {
                a.write(f, 4)?;
                f.write_str(if *op == ArithOp::Add { " + " } else { " - " })?;
                b.write(f, 5)?;
            }
            ClueExpr::Cmp(op, a, b) => {
                a.write(f, 4)?;
                write!(f, " {} ", op.symbol())?;
                b.write(f, 4)?;
            }
            ClueExpr::And(a, b) => {
                a.write(f, 2)?;
                f.write_str(" and ")?;
                b.write(f, 3)?;
            }
            ClueExpr::Or(a, b) => {
                a.write(f, 1)?;
                f.write_str(" or ")?;
                b.write(f, 2)?;
            }
            ClueExpr::EitherOr(a, b) => {
                f.write_str("either_or(")?;
                a.write(f, 1)?;
                f.write_str(", ")?;
                b.write(f, 1)?;
                f.write_str(")")?;
            }
            ClueExpr::OneOther([x, y], [p, q]) => {
                write!(f, "one_other(({x}, {y}), ({p}, {q}))")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for ClueExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Str(String),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Cmp(CmpOp),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset: usize, message: &str| Error::Syntax {
        offset,
        message: message.to_string(),
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'<' => out.push((Tok::Cmp(CmpOp::Lt), start)),
            b'>' => out.push((Tok::Cmp(CmpOp::Gt), start)),
            b'=' | b'!' => {
                if bytes.get(i + 1) != Some(&b'=') {
                    return Err(err(start, "expected '=='  or '!='"));
                }
                let op = if c == b'=' { CmpOp::Eq } else { CmpOp::Ne };
                out.push((Tok::Cmp(op), start));
                i += 1;
            }
            b'\'' | b'"' => {
                let mut s = String::new();
                let mut j = i + 1;
                let mut closed = false;
                let rest = &src[j..];
                let mut chars = rest.char_indices();
                while let Some((k, ch)) = chars.next() {
                    if ch == '\\' {
                        if let Some((_, esc)) = chars.next() {
                            s.push(esc);
                        }
                        continue;
                    }
                    if ch as u32 == c as u32 {
                        j += k;
                        closed = true;
                        break;
                    }
                    s.push(ch);
                }
                if !closed {
                    return Err(err(start, "unterminated string"));
                }
                out.push((Tok::Str(s), start));
                i = j;
            }
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let v = src[i..j]
                    .parse()
                    .map_err(|_| err(start, "integer out of range"))?;
                out.push((Tok::Int(v), start));
                i = j - 1;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((Tok::Ident(src[i..j].to_string()), start));
                i = j - 1;
            }
            _ => return Err(err(start, "unexpected character")),
        }
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

/// Parse one clue.
/// Syntax errors carry a 1-based character column; end of input is
/// reported one past the last character.
pub fn parse_clue(src: &str) -> Result<ClueExpr> {
    parse_inner(src).map_err(|e| match e {
        Error::Syntax { offset, message } => Error::Syntax {
            offset: src[..offset.min(src.len())].chars().count() + 1,
            message,
        },
        other => other,
    })
}

fn parse_inner(src: &str) -> Result<ClueExpr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    p.expect(&Tok::End, "end of clue")?;
    Ok(e)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, what: &str) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            message: format!("expected {what}"),
        })
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        if self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(what)
        }
    }

    fn keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == word)
    }

    fn expr(&mut self) -> Result<ClueExpr> {
        let mut e = self.and()?;
        while self.keyword("or") {
            self.bump();
            let rhs = self.and()?;
            e = ClueExpr::Or(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn and(&mut self) -> Result<ClueExpr> {
        let mut e = self.cmp()?;
        while self.keyword("and") {
            self.bump();
            let rhs = self.cmp()?;
            e = ClueExpr::And(Box::new(e), Box::new(rhs));
        }
        Ok(e)
    }

    fn cmp(&mut self) -> Result<ClueExpr> {
        let lhs = self.sum()?;
        if let Tok::Cmp(op) = *self.peek() {
            self.bump();
            let rhs = self.sum()?;
            return Ok(ClueExpr::Cmp(op, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<ClueExpr> {
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(e),
            };
            self.bump();
            let rhs = self.term()?;
            e = ClueExpr::Arith(op, Box::new(e), Box::new(rhs));
        }
    }

    fn lit(&mut self) -> Result<Lit> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Lit::Int(v))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Lit::Str(s))
            }
            _ => self.fail("a number or quoted attribute"),
        }
    }

    fn pair(&mut self) -> Result<[Lit; 2]> {
        self.expect(&Tok::LParen, "'('")?;
        let a = self.lit()?;
        self.expect(&Tok::Comma, "','")?;
        let b = self.lit()?;
        self.expect(&Tok::RParen, "')'")?;
        Ok([a, b])
    }

    fn term(&mut self) -> Result<ClueExpr> {
        match self.peek().clone() {
            Tok::Int(_) | Tok::Str(_) => Ok(ClueExpr::Lit(self.lit()?)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                self.expect(&Tok::LParen, "'(' after function name")?;
                let e = match name.as_str() {
                    "r" => ClueExpr::Row(self.lit()?),
                    "c" => ClueExpr::Col(self.lit()?),
                    "T" => {
                        let a = self.sum()?;
                        self.expect(&Tok::Comma, "','")?;
                        let b = self.sum()?;
                        ClueExpr::Cell(Box::new(a), Box::new(b))
                    }
                    "either_or" => {
                        let a = self.expr()?;
                        self.expect(&Tok::Comma, "','")?;
                        let b = self.expr()?;
                        ClueExpr::EitherOr(Box::new(a), Box::new(b))
                    }
                    "one_other" => {
                        let a = self.pair()?;
                        self.expect(&Tok::Comma, "','")?;
                        let b = self.pair()?;
                        ClueExpr::OneOther(a, b)
                    }
                    _ => {
                        return Err(Error::Syntax {
                            offset: self.toks[self.pos - 2].1,
                            message: format!("unknown function {name:?}"),
                        })
                    }
                };
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => self.fail("a term"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(src: &str) {
        let e = parse_clue(src).unwrap();
        assert_eq!(e.to_string(), src);
    }

    #[test]
    fn printer_inverts_parser() {
        round_trip("T(r('Guy'), c('Time')) - T(r('back pain'), c('Time')) == 1");
        round_trip("either_or(r(12) == r('Terry'), r(12) == r('Ambercare'))");
        round_trip("one_other(('vertigo', 'Ambercare'), (11, 'Billy'))");
        round_trip("r('a') != r('b') and r('a') != r('c') or r(9) == r('d')");
        round_trip("(r('a') == r('b') or r('a') == r('c')) and r('d') == 3");
        round_trip("T(r('x'), c('n')) - (T(r('y'), c('n')) - 1) > 0");
        round_trip("\"O'Hara\" == T(r(1), 1)");
    }

    #[test]
    fn comparison_shape() {
        let e = parse_clue("T(r('Guy'), c('Time')) - T(r('back pain'), c('Time')) == 1").unwrap();
        let ClueExpr::Cmp(CmpOp::Eq, lhs, rhs) = e else {
            panic!("not a comparison")
        };
        assert!(matches!(*lhs, ClueExpr::Arith(ArithOp::Sub, _, _)));
        assert_eq!(*rhs, ClueExpr::Lit(Lit::Int(1)));
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        match parse_clue("T(r('Guy')") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 11),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn other_errors() {
        assert!(matches!(parse_clue("r('a') = 1"), Err(Error::Syntax { offset: 8, .. })));
        assert!(matches!(parse_clue("q('a')"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse_clue("r('a"), Err(Error::Syntax { offset: 3, .. })));
        assert!(parse_clue("r(1) == ").is_err());
    }
}
