//! Infix expression parser.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := atom ('^' unary)?          exponent must fold to an integer
//! atom    := number | ident | ident '(' expr ')' | '(' expr ')'
//! ident   := t{a} | x{i} | v{i}_{a} | sin | cos | tan | exp | log | sqrt | sinh | cosh
//! ```

use thiserror::Error;

use super::node::{Expr, Func};
use super::{Coord, Dims};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {expected}, found `{found}`")]
    Expected { expected: &'static str, found: String },
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("unknown identifier `{0}`")]
    UnknownIdent(String),
    #[error("index of `{name}` out of range for dims (p={p}, n={n})")]
    IndexOutOfRange { name: String, p: usize, n: usize },
    #[error("exponent must be an integer constant")]
    NonIntegerExponent,
    #[error("trailing input `{0}`")]
    Trailing(String),
}

/// Syntax or name-resolution failure with the byte offset where it occurred.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at position {pos}: {kind}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some(t) = lx.next()? {
            out.push(t);
        }
        Ok(out)
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let start = self.pos;
        let Some(c) = self.peek_char() else {
            return Ok(None);
        };
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => {
                self.pos += 1;
                Tok::Op(c)
            }
            '(' => {
                self.pos += 1;
                Tok::LParen
            }
            ')' => {
                self.pos += 1;
                Tok::RParen
            }
            c if c.is_ascii_digit() || c == '.' => self.number(start)?,
            c if c.is_ascii_alphabetic() => {
                let len = self.src[start..]
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(self.src.len() - start);
                self.pos += len;
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            other => {
                return Err(ParseError {
                    pos: start,
                    kind: ParseErrorKind::UnexpectedChar(other),
                })
            }
        };
        Ok(Some((start, tok)))
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let bytes = self.src.as_bytes();
        let mut i = start;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.src[start..i];
        self.pos = i;
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Tok::Num)
            .ok_or_else(|| ParseError {
                pos: start,
                kind: ParseErrorKind::BadNumber(text.to_string()),
            })
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    dims: Dims,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            pos: self.pos(),
            kind,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek() {
            let op = *op;
            self.bump();
            let rhs = self.term()?;
            lhs = if op == '+' { lhs.add(&rhs) } else { lhs.sub(&rhs) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek() {
            let op = *op;
            self.bump();
            let rhs = self.unary()?;
            lhs = if op == '*' { lhs.mul(&rhs) } else { lhs.div(&rhs) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Some(Tok::Op('+')) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.bump();
            let at = self.pos();
            let exp = self.unary()?;
            let k = exp
                .as_const()
                .filter(|k| k.fract() == 0.0 && k.abs() <= i32::MAX as f64)
                .ok_or(ParseError {
                    pos: at,
                    kind: ParseErrorKind::NonIntegerExponent,
                })?;
            return Ok(base.powi(k as i32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.pos();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::constant(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(f) = Func::from_name(&name) {
                    match self.bump() {
                        Some(Tok::LParen) => {}
                        other => {
                            self.idx -= 1;
                            return Err(self.err(ParseErrorKind::Expected {
                                expected: "`(` after function name",
                                found: describe(other.as_ref()),
                            }));
                        }
                    }
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(arg.apply(f));
                }
                let c = resolve(&name, self.dims).map_err(|kind| ParseError { pos: at, kind })?;
                Ok(Expr::var(c))
            }
            Some(other) => {
                self.idx -= 1;
                Err(self.err(ParseErrorKind::Expected {
                    expected: "a number, variable, function or `(`",
                    found: describe(Some(&other)),
                }))
            }
            None => Err(ParseError {
                pos: self.end,
                kind: ParseErrorKind::UnexpectedEnd,
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.bump();
                Ok(())
            }
            None => Err(self.err(ParseErrorKind::UnexpectedEnd)),
            other => {
                let found = describe(other);
                Err(self.err(ParseErrorKind::Expected {
                    expected: "`)`",
                    found,
                }))
            }
        }
    }
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Num(v)) => v.to_string(),
        Some(Tok::Ident(s)) => s.clone(),
        Some(Tok::Op(c)) => c.to_string(),
        Some(Tok::LParen) => "(".into(),
        Some(Tok::RParen) => ")".into(),
    }
}

fn index(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn resolve(name: &str, dims: Dims) -> Result<Coord, ParseErrorKind> {
    let unknown = || ParseErrorKind::UnknownIdent(name.to_string());
    let out_of_range = || ParseErrorKind::IndexOutOfRange {
        name: name.to_string(),
        p: dims.p,
        n: dims.n,
    };
    let one_based = |k: usize, max: usize| {
        if (1..=max).contains(&k) {
            Ok(k - 1)
        } else {
            Err(out_of_range())
        }
    };
    let (head, rest) = name.split_at(1);
    match head {
        "t" => {
            let a = index(rest).ok_or_else(unknown)?;
            Ok(Coord::Time(one_based(a, dims.p)?))
        }
        "x" => {
            let i = index(rest).ok_or_else(unknown)?;
            Ok(Coord::Space(one_based(i, dims.n)?))
        }
        "v" => {
            let (i, a) = rest.split_once('_').ok_or_else(unknown)?;
            let (i, a) = (index(i).ok_or_else(unknown)?, index(a).ok_or_else(unknown)?);
            Ok(Coord::Fiber {
                i: one_based(i, dims.n)?,
                a: one_based(a, dims.p)?,
            })
        }
        _ => Err(unknown()),
    }
}

/// Parses `text` into an expression over the jet coordinates of `dims`.
pub fn parse(text: &str, dims: Dims) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
        dims,
    };
    let e = p.expr()?;
    if p.idx < p.toks.len() {
        let pos = p.pos();
        return Err(ParseError {
            pos,
            kind: ParseErrorKind::Trailing(text[pos..].to_string()),
        });
    }
    Ok(e)
}
