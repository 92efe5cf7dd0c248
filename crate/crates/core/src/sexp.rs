//! A small s-expression reader shared by every text format in the crate.
//!
//! Atoms are maximal runs of characters other than whitespace, parentheses
//! and `;`. A `;` starts a comment running to the end of the line.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    /// The head atom of a list, e.g. `rule` for `(rule q f ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }

    pub fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let p = self.pos();
        Err(Error::Parse {
            line: p.line,
            column: p.column,
            message: message.into(),
        })
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str> {
        match self.as_atom() {
            Some(a) => Ok(a),
            None => self.error(format!("expected {what}, found a list")),
        }
    }

    pub fn expect_list(&self, what: &str) -> Result<&[Sexp]> {
        match self.as_list() {
            Some(l) => Ok(l),
            None => self.error(format!("expected {what}, found an atom")),
        }
    }

    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into(), Pos { line: 0, column: 0 })
    }

    pub fn list(items: Vec<Sexp>) -> Sexp {
        Sexp::List(items, Pos { line: 0, column: 0 })
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a, _) => f.write_str(a),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        })
    }

    fn read(&mut self) -> Result<Sexp> {
        self.skip_trivia();
        let start = self.pos();
        match self.chars.peek() {
            None => self.fail("unexpected end of input"),
            Some(')') => self.fail("unexpected ')'"),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(Error::Parse {
                                line: start.line,
                                column: start.column,
                                message: "unclosed '('".into(),
                            })
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

/// Parses every top-level expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.chars.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}

/// Parses exactly one expression.
pub fn parse_one(text: &str) -> Result<Sexp> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(Error::Parse {
            line: 1,
            column: 1,
            message: "empty input".into(),
        }),
        _ => {
            let p = all[1].pos();
            Err(Error::Parse {
                line: p.line,
                column: p.column,
                message: "trailing input after the first expression".into(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_and_comments() {
        let s = parse_one("(f (a (e)) ; comment\n (e))").unwrap();
        assert_eq!(s.to_string(), "(f (a (e)) (e))");
    }

    #[test]
    fn reports_positions() {
        match parse_one("(f\n  (a") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_one("(f))") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 4)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
