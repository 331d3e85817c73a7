//! Text notation for header types: `0`, `1`, instance names, `.` for
//! concatenation, `+` for choice, parentheses for grouping.

use std::fmt;

use thiserror::Error;

use crate::syntax::{InstId, Program};

use super::denote::Denotation;
use super::term::{HeaderType, Kind};

/// Maps instance ids to printable names.
pub trait InstNames {
    fn inst_name(&self, id: InstId) -> String;
}

impl InstNames for Program {
    fn inst_name(&self, id: InstId) -> String {
        Program::inst_name(self, id).to_string()
    }
}

impl InstNames for [String] {
    fn inst_name(&self, id: InstId) -> String {
        self.get(id.index()).cloned().unwrap_or_else(|| format!("#{}", id.0))
    }
}

impl InstNames for Vec<String> {
    fn inst_name(&self, id: InstId) -> String {
        self.as_slice().inst_name(id)
    }
}

pub struct Display<'a, N: InstNames + ?Sized> {
    ty: &'a HeaderType,
    names: &'a N,
}

impl HeaderType {
    pub fn display<'a, N: InstNames + ?Sized>(&'a self, names: &'a N) -> Display<'a, N> {
        Display { ty: self, names }
    }
}

impl<N: InstNames + ?Sized> fmt::Display for Display<'_, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ty(self.ty, self.names, f)
    }
}

fn write_ty<N: InstNames + ?Sized>(t: &HeaderType, names: &N, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t.kind() {
        Kind::Zero => f.write_str("0"),
        Kind::One => f.write_str("1"),
        Kind::Inst(h) => f.write_str(&names.inst_name(*h)),
        Kind::Concat(a, b) => {
            write_wrapped(a, names, f, !matches!(a.kind(), Kind::Zero | Kind::One | Kind::Inst(_)))?;
            f.write_str(".")?;
            write_wrapped(b, names, f, matches!(b.kind(), Kind::Choice(..)))
        }
        Kind::Choice(a, b) => {
            write_wrapped(a, names, f, matches!(a.kind(), Kind::Choice(..)))?;
            f.write_str(" + ")?;
            write_ty(b, names, f)
        }
    }
}

fn write_wrapped<N: InstNames + ?Sized>(t: &HeaderType, names: &N, f: &mut fmt::Formatter<'_>, wrap: bool) -> fmt::Result {
    if wrap {
        f.write_str("(")?;
        write_ty(t, names, f)?;
        f.write_str(")")
    } else {
        write_ty(t, names, f)
    }
}

/// `{{a,b},{a}}` with alternatives in canonical order.
pub fn format_denotation<N: InstNames + ?Sized>(d: &Denotation, names: &N) -> String {
    let alts: Vec<String> = d
        .iter()
        .map(|s| {
            let inner: Vec<String> = s.iter().map(|h| names.inst_name(h)).collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect();
    format!("{{{}}}", alts.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("unexpected `{found}` at offset {offset}")]
    Unexpected { found: String, offset: usize },
}

/// Parse the notation, keeping the term exactly as written (no simplification).
pub fn parse_notation(src: &str, lookup: &dyn Fn(&str) -> Option<InstId>) -> Result<HeaderType, NotationError> {
    let mut p = NotationParser { src, pos: 0, lookup };
    let t = p.sum()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(p.unexpected());
    }
    Ok(t)
}

struct NotationParser<'a> {
    src: &'a str,
    pos: usize,
    lookup: &'a dyn Fn(&str) -> Option<InstId>,
}

impl NotationParser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn unexpected(&self) -> NotationError {
        let found = self.src[self.pos..].chars().next().map(String::from).unwrap_or_else(|| "end of input".into());
        NotationError::Unexpected {
            found,
            offset: self.pos,
        }
    }

    fn sum(&mut self) -> Result<HeaderType, NotationError> {
        let first = self.product()?;
        if self.peek() == Some('+') {
            self.pos += 1;
            let rest = self.sum()?;
            return Ok(HeaderType::choice_raw(first, rest));
        }
        Ok(first)
    }

    fn product(&mut self) -> Result<HeaderType, NotationError> {
        let first = self.atom()?;
        match self.peek() {
            Some(c @ ('.' | '·')) => {
                self.pos += c.len_utf8();
                let rest = self.product()?;
                Ok(HeaderType::concat_raw(first, rest))
            }
            _ => Ok(first),
        }
    }

    fn atom(&mut self) -> Result<HeaderType, NotationError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.unexpected());
                }
                self.pos += 1;
                Ok(t)
            }
            Some('0') => {
                self.pos += 1;
                Ok(HeaderType::zero())
            }
            Some('1') => {
                self.pos += 1;
                Ok(HeaderType::one())
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c.is_alphanumeric() || c == '_' {
                        self.pos += c.len_utf8();
                    } else {
                        break;
                    }
                }
                let name = &self.src[start..self.pos];
                (self.lookup)(name)
                    .map(HeaderType::inst)
                    .ok_or_else(|| NotationError::UnknownInstance(name.to_string()))
            }
            _ => Err(self.unexpected()),
        }
    }
}
