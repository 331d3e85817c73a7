use crate::diagnostics::{Diagnostic, DiagnosticKind};

use super::span::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Integer literal with an optional `:width` suffix written without spaces.
    Int { value: u128, width: Option<u32> },
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Colon,
    Dot,
    Assign,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
    Plus,
    Minus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int { value, width: Some(w) } => format!("`{value}:{w}`"),
            Tok::Int { value, width: None } => format!("`{value}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Assign => "=",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::Plus => "+",
            Tok::Minus => "-",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn syntax(msg: impl Into<String>, start: usize, end: usize) -> Diagnostic {
    Diagnostic::error(DiagnosticKind::Syntax, msg, Span::new(start, end))
}

pub fn parse_int(digits: &str) -> Option<u128> {
    if let Some(hex) = digits.strip_prefix("0x").or_else(|| digits.strip_prefix("0X")) {
        u128::from_str_radix(hex, 16).ok()
    } else if let Some(bin) = digits.strip_prefix("0b") {
        u128::from_str_radix(bin, 2).ok()
    } else {
        digits.parse().ok()
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") || c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let Some(end) = src[i + 2..].find("*/") else {
                return Err(syntax("unterminated block comment", i, i + 2));
            };
            i += end + 4;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                span: Span::new(start, i),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let digits: String = src[start..i].chars().filter(|&c| c != '_').collect();
            let value = parse_int(&digits).ok_or_else(|| syntax(format!("malformed integer `{}`", &src[start..i]), start, i))?;
            let mut width = None;
            if i + 1 < bytes.len() && bytes[i] == b':' && bytes[i + 1].is_ascii_digit() {
                let wstart = i + 1;
                let mut j = wstart;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let w: u32 = src[wstart..j]
                    .parse()
                    .map_err(|_| syntax("malformed width", wstart, j))?;
                width = Some(w);
                i = j;
            }
            out.push(Token {
                tok: Tok::Int { value, width },
                span: Span::new(start, i),
            });
            continue;
        }
        let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
        let (tok, len) = match two {
            "==" => (Tok::EqEq, 2),
            "!=" => (Tok::NotEq, 2),
            "&&" => (Tok::AndAnd, 2),
            "||" => (Tok::OrOr, 2),
            _ => match c {
                b'{' => (Tok::LBrace, 1),
                b'}' => (Tok::RBrace, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b';' => (Tok::Semi, 1),
                b',' => (Tok::Comma, 1),
                b':' => (Tok::Colon, 1),
                b'.' => (Tok::Dot, 1),
                b'=' => (Tok::Assign, 1),
                b'!' => (Tok::Bang, 1),
                b'+' => (Tok::Plus, 1),
                b'-' => (Tok::Minus, 1),
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err(syntax(format!("unexpected character `{ch}`"), i, i + ch.len_utf8()));
                }
            },
        };
        i += len;
        out.push(Token {
            tok,
            span: Span::new(start, i),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len()),
    });
    Ok(out)
}
