//! Reader and writer for the small subset of Python literal syntax used by
//! state texts: nested lists, integers and quoted strings.
//!
//! Model answers are read leniently (any whitespace, either quote style,
//! trailing commas); output is always the `repr`-style form with `", "`
//! separators.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PyValue {
    Int(i64),
    Str(String),
    List(Vec<PyValue>),
}

impl PyValue {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            PyValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            PyValue::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[PyValue]> {
        match self {
            PyValue::List(items) => Some(items),
            _ => None,
        }
    }
}

impl fmt::Display for PyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PyValue::Int(v) => write!(f, "{v}"),
            PyValue::Str(s) => f.write_str(&quote(s)),
            PyValue::List(items) => {
                f.write_char('[')?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_char(']')
            }
        }
    }
}

/// Quote a string the way Python's `repr` does.
pub fn quote(s: &str) -> String {
    let delim = if s.contains('\'') && !s.contains('"') {
        '"'
    } else {
        '\''
    };
    let mut out = String::with_capacity(s.len() + 2);
    out.push(delim);
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if c == delim => {
                out.push('\\');
                out.push(c);
            }
            c => out.push(c),
        }
    }
    out.push(delim);
    out
}

/// Parse exactly one literal; anything but whitespace after it is an error.
pub fn parse(text: &str) -> Result<PyValue> {
    let mut p = Parser::new(text);
    let value = p.value()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing characters after literal"));
    }
    Ok(value)
}

/// Parse the first literal starting at or after the first `[` in `text`,
/// ignoring whatever follows it. Returns the value and the byte offset
/// just past it.
pub fn parse_prefix(text: &str) -> Result<(PyValue, usize)> {
    let start = text
        .find('[')
        .ok_or_else(|| Error::Parse("no list literal found".into()))?;
    let mut p = Parser::new(text);
    p.pos = start;
    let value = p.value()?;
    Ok((value, p.pos))
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn value(&mut self) -> Result<PyValue> {
        self.skip_ws();
        match self.peek() {
            Some(b'[') => self.list(),
            Some(b'\'') | Some(b'"') => self.string().map(PyValue::Str),
            Some(c) if c == b'-' || c.is_ascii_digit() => self.int(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn list(&mut self) -> Result<PyValue> {
        self.pos += 1;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b']') => {
                    self.pos += 1;
                    return Ok(PyValue::List(items));
                }
                None => return Err(self.err("unterminated list")),
                _ => {}
            }
            items.push(self.value()?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {}
                None => return Err(self.err("unterminated list")),
                Some(_) => return Err(self.err("expected ',' or ']'")),
            }
        }
    }

    fn int(&mut self) -> Result<PyValue> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map(PyValue::Int)
            .map_err(|_| Error::Parse(format!("bad integer at offset {start}")))
    }

    fn string(&mut self) -> Result<String> {
        let delim = self.bytes[self.pos] as char;
        self.pos += 1;
        let mut out = String::new();
        let mut chars = self.src[self.pos..].char_indices();
        while let Some((i, ch)) = chars.next() {
            match ch {
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, c)) => out.push(c),
                    None => break,
                },
                c if c == delim => {
                    self.pos += i + 1;
                    return Ok(out);
                }
                c => out.push(c),
            }
        }
        Err(self.err("unterminated string"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_round_trip() {
        let text = "[['times', 'names'], [9, ''], [10, 'Billy']]";
        let v = parse(text).unwrap();
        assert_eq!(v.to_string(), text);
    }

    #[test]
    fn lenient_whitespace_and_quotes() {
        let v = parse(" [ [1,2 ,3] ,[\"a\" ,'b',] ] ").unwrap();
        assert_eq!(v.to_string(), "[[1, 2, 3], ['a', 'b']]");
    }

    #[test]
    fn truncated_input_is_rejected() {
        assert!(parse("[[1,2").is_err());
        assert!(parse("['abc").is_err());
    }

    #[test]
    fn apostrophes_use_double_quotes() {
        assert_eq!(quote("O'Neil"), "\"O'Neil\"");
        assert_eq!(parse("\"O'Neil\"").unwrap().as_str(), Some("O'Neil"));
    }

    #[test]
    fn prefix_ignores_trailing_prose() {
        let (v, end) = parse_prefix("Next state: [1, 2]\nDone.").unwrap();
        assert_eq!(v.to_string(), "[1, 2]");
        assert_eq!(end, 18);
    }
}
