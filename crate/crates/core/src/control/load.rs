//! Entries file format, one entry per line:
//!
//! ```text
//! table <name>: valids=<bits> keys=<pat>,<pat> -> <action>(<data>, ...)
//! default <name> -> <action>(<data>, ...)
//! ```
//!
//! `valids=` is required when the table has valid matches and gives one bit per
//! valid match in declaration order. Key patterns are `*`, a value, or
//! `value/mask`; values are decimal, `0x` hex, `0b` binary, dotted quads for
//! 32-bit keys, or `true`/`false`. `#` starts a comment.

use std::collections::BTreeSet;

use crate::check::expr_type;
use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::syntax::lexer::parse_int;
use crate::syntax::{mask, BaseType, MatchKind, Program, Span, TableDecl, Value};

use super::{ActionCall, Entry, KeyPattern, TableState};

pub fn load_entries(text: &str, p: &Program) -> Result<TableState, Vec<Diagnostic>> {
    let mut st = TableState::default();
    let mut diags = Vec::new();
    let mut defaults_seen = BTreeSet::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let start = offset;
        offset += raw.len();
        let line = raw.split('#').next().unwrap_or("").trim_end();
        let lead = line.len() - line.trim_start().len();
        let line = line.trim_start();
        if line.is_empty() {
            continue;
        }
        let span = Span::new(start + lead, start + lead + line.len());
        let err = |kind, msg: String| Diagnostic::error(kind, msg, span);
        let res = if let Some(rest) = line.strip_prefix("table ") {
            parse_entry(rest, p, span).map(|(t, e)| st.tables.entry(t).or_default().entries.push(e))
        } else if let Some(rest) = line.strip_prefix("default ") {
            parse_default(rest, p, span).and_then(|(t, call)| {
                if !defaults_seen.insert(t.clone()) {
                    return Err(err(DiagnosticKind::Duplicate, format!("duplicate default for table {t}")));
                }
                st.tables.entry(t).or_default().default_override = Some(call);
                Ok(())
            })
        } else {
            Err(err(DiagnosticKind::Syntax, "expected `table` or `default`".into()))
        };
        if let Err(d) = res {
            diags.push(d);
        }
    }
    if diags.is_empty() {
        Ok(st)
    } else {
        Err(diags)
    }
}

fn table<'p>(p: &'p Program, name: &str, span: Span) -> Result<&'p TableDecl, Diagnostic> {
    p.tables
        .get(name)
        .ok_or_else(|| Diagnostic::error(DiagnosticKind::UnknownName, format!("unknown table {name}"), span))
}

fn parse_entry(rest: &str, p: &Program, span: Span) -> Result<(String, Entry), Diagnostic> {
    let err = |kind, msg: String| Diagnostic::error(kind, msg, span);
    let (lhs, call) = rest
        .split_once("->")
        .ok_or_else(|| err(DiagnosticKind::Syntax, "expected `->` before the action".into()))?;
    let (name, fields) = lhs
        .split_once(':')
        .ok_or_else(|| err(DiagnosticKind::Syntax, "expected `:` after the table name".into()))?;
    let name = name.trim();
    let t = table(p, name, span)?;

    // Rejoin comma-separated lists split by spaces.
    let mut items: Vec<String> = Vec::new();
    for w in fields.split_whitespace() {
        match items.last_mut() {
            Some(prev) if prev.ends_with(',') || w.starts_with(',') => prev.push_str(w),
            _ => items.push(w.to_string()),
        }
    }
    let mut valids: Option<&str> = None;
    let mut keys: Option<&str> = None;
    for item in &items {
        if let Some(v) = item.strip_prefix("valids=") {
            valids = Some(v);
        } else if let Some(k) = item.strip_prefix("keys=") {
            keys = Some(k);
        } else {
            return Err(err(DiagnosticKind::Syntax, format!("unexpected `{item}`")));
        }
    }

    let bits = valids.unwrap_or("");
    if bits.len() != t.valids.len() || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(err(
            DiagnosticKind::Arity,
            format!("table {name} needs valids= with {} bits of 0 or 1", t.valids.len()),
        ));
    }
    let valid_bits: Vec<bool> = bits.chars().map(|c| c == '1').collect();

    let key_texts: Vec<&str> = match keys {
        Some(k) if !k.is_empty() => k.split(',').map(str::trim).collect(),
        _ => Vec::new(),
    };
    if key_texts.len() != t.reads.len() {
        return Err(err(
            DiagnosticKind::Arity,
            format!("table {name} has {} keys but the entry gives {}", t.reads.len(), key_texts.len()),
        ));
    }
    let mut patterns = Vec::new();
    for (read, text) in t.reads.iter().zip(key_texts) {
        let ty = expr_type(p, &read.expr).ok_or_else(|| err(DiagnosticKind::TypeMismatch, "ill-typed key".into()))?;
        patterns.push(parse_pattern(text, ty, read.kind).map_err(|m| err(DiagnosticKind::Malformed, m))?);
    }

    let call = parse_call(call, t, p, span)?;
    Ok((
        name.to_string(),
        Entry {
            valid_bits,
            keys: patterns,
            action: call.action,
            data: call.data,
            span,
        },
    ))
}

fn parse_default(rest: &str, p: &Program, span: Span) -> Result<(String, ActionCall), Diagnostic> {
    let (name, call) = rest.split_once("->").ok_or_else(|| {
        Diagnostic::error(DiagnosticKind::Syntax, "expected `->` before the action", span)
    })?;
    let name = name.trim();
    let t = table(p, name, span)?;
    Ok((name.to_string(), parse_call(call, t, p, span)?))
}

fn parse_call(text: &str, t: &TableDecl, p: &Program, span: Span) -> Result<ActionCall, Diagnostic> {
    let err = |kind, msg: String| Diagnostic::error(kind, msg, span);
    let text = text.trim();
    let (name, args) = match text.split_once('(') {
        Some((n, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| err(DiagnosticKind::Syntax, "expected `)` after action data".into()))?;
            (n.trim(), inner.trim())
        }
        None => (text, ""),
    };
    if !t.actions.iter().any(|a| a.name == name) {
        return Err(err(
            DiagnosticKind::UnknownName,
            format!("action {name} is not an action of table {}", t.name),
        ));
    }
    let decl = p
        .action(name)
        .map_err(|e| err(DiagnosticKind::UnknownName, e.to_string()))?;
    let args: Vec<&str> = if args.is_empty() { Vec::new() } else { args.split(',').map(str::trim).collect() };
    if args.len() != decl.params.len() {
        return Err(err(
            DiagnosticKind::Arity,
            format!("action {name} takes {} arguments but {} were given", decl.params.len(), args.len()),
        ));
    }
    let data = decl
        .params
        .iter()
        .zip(args)
        .map(|(prm, a)| parse_value(a, prm.ty).map_err(|m| err(DiagnosticKind::TypeMismatch, format!("{}: {m}", prm.name.name))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ActionCall {
        action: name.to_string(),
        data,
        span,
    })
}

fn parse_pattern(text: &str, ty: BaseType, kind: MatchKind) -> Result<KeyPattern, String> {
    if text == "*" {
        return match kind {
            MatchKind::Ternary => Ok(KeyPattern::Wildcard),
            MatchKind::Exact => Err("an exact key cannot be wildcarded".into()),
        };
    }
    if let Some((v, m)) = text.split_once('/') {
        if kind == MatchKind::Exact {
            return Err("an exact key takes a plain value".into());
        }
        let (Value::Bits { value, .. }, Value::Bits { value: mask, .. }) = (parse_value(v, ty)?, parse_value(m, ty)?) else {
            return Err("boolean keys cannot be masked".into());
        };
        return Ok(KeyPattern::Ternary { value, mask });
    }
    let v = parse_value(text, ty)?;
    Ok(match (kind, v) {
        (MatchKind::Ternary, Value::Bits { width, value }) => KeyPattern::Ternary { value, mask: mask(width) },
        _ => KeyPattern::Exact(v),
    })
}

/// A literal of type `ty`; the width may be left implicit.
pub fn parse_value(text: &str, ty: BaseType) -> Result<Value, String> {
    let text = text.trim();
    match ty {
        BaseType::Bool => match text {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(format!("expected true or false, found `{text}`")),
        },
        BaseType::Bits(w) => {
            let (digits, width) = match text.rsplit_once(':') {
                Some((d, wtxt)) => {
                    let given: u32 = wtxt.parse().map_err(|_| format!("malformed width in `{text}`"))?;
                    if given != w {
                        return Err(format!("expected a {w}-bit value, found `{text}`"));
                    }
                    (d, given)
                }
                None => (text, w),
            };
            let value = if digits.matches('.').count() == 3 {
                if width != 32 {
                    return Err(format!("dotted quad `{digits}` needs a 32-bit key"));
                }
                digits.split('.').try_fold(0u128, |acc, octet| {
                    octet
                        .parse::<u8>()
                        .map(|o| acc << 8 | o as u128)
                        .map_err(|_| format!("malformed address `{digits}`"))
                })?
            } else {
                parse_int(&digits.replace('_', "")).ok_or_else(|| format!("malformed value `{digits}`"))?
            };
            if value > mask(width) {
                return Err(format!("value `{digits}` does not fit in {width} bits"));
            }
            Ok(Value::bits(width, value))
        }
    }
}
