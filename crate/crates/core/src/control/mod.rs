//! Control-plane model: table entries, action selection and well-behavedness.

mod load;
mod validate;

use std::fmt;

use indexmap::IndexMap;

use crate::interp::{eval_expression, Fault, HeaderMap};
use crate::syntax::{Program, Span, TableDecl, Value};

pub use load::load_entries;
pub use validate::validate_well_behaved;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyPattern {
    Wildcard,
    Exact(Value),
    Ternary { value: u128, mask: u128 },
}

impl KeyPattern {
    pub fn matches(&self, v: &Value) -> bool {
        match (self, v) {
            (KeyPattern::Wildcard, _) => true,
            (KeyPattern::Exact(p), v) => p == v,
            (KeyPattern::Ternary { value, mask }, Value::Bits { value: x, .. }) => x & mask == value & mask,
            (KeyPattern::Ternary { .. }, Value::Bool(_)) => false,
        }
    }
}

impl fmt::Display for KeyPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KeyPattern::Wildcard => f.write_str("*"),
            KeyPattern::Exact(Value::Bool(b)) => write!(f, "{b}"),
            KeyPattern::Exact(Value::Bits { value, .. }) => write!(f, "{value:#x}"),
            KeyPattern::Ternary { value, mask } => write!(f, "{value:#x}/{mask:#x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// One bit per instance in the table's valid matches, in declaration order.
    pub valid_bits: Vec<bool>,
    /// One pattern per reads expression.
    pub keys: Vec<KeyPattern>,
    pub action: String,
    pub data: Vec<Value>,
    /// Location in the entries file.
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionCall {
    pub action: String,
    pub data: Vec<Value>,
    pub span: Span,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableEntries {
    pub entries: Vec<Entry>,
    pub default_override: Option<ActionCall>,
}

/// Installed entries for every table; tables without entries always miss.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableState {
    pub tables: IndexMap<String, TableEntries>,
}

impl TableState {
    pub fn entries(&self, table: &str) -> Option<&TableEntries> {
        self.tables.get(table)
    }

    /// Entries file text that loads back to this state.
    pub fn to_text(&self, p: &Program) -> String {
        let mut out = String::new();
        for (name, te) in &self.tables {
            for e in &te.entries {
                let bits: String = e.valid_bits.iter().map(|b| if *b { '1' } else { '0' }).collect();
                let keys: Vec<String> = e.keys.iter().map(|k| k.to_string()).collect();
                out.push_str(&format!("table {name}:"));
                if p.tables.get(name).is_some_and(|t| !t.valids.is_empty()) {
                    out.push_str(&format!(" valids={bits}"));
                }
                if !keys.is_empty() {
                    out.push_str(&format!(" keys={}", keys.join(",")));
                }
                out.push_str(&format!(" -> {}({})\n", e.action, format_data(&e.data)));
            }
            if let Some(d) = &te.default_override {
                out.push_str(&format!("default {name} -> {}({})\n", d.action, format_data(&d.data)));
            }
        }
        out
    }
}

fn format_data(data: &[Value]) -> String {
    let parts: Vec<String> = data
        .iter()
        .map(|v| match v {
            Value::Bool(b) => b.to_string(),
            Value::Bits { value, .. } => format!("{value:#x}"),
        })
        .collect();
    parts.join(", ")
}

/// `𝓒𝓐(t, H)`: the first entry whose valid bits and keys match, else the
/// default. `None` is the implicit no-op.
pub fn select_action(
    p: &Program,
    t: &TableDecl,
    h: &HeaderMap,
    st: &TableState,
) -> Result<Option<(String, Vec<Value>)>, Fault> {
    let te = st.entries(&t.name.name);
    if let Some(te) = te {
        'entries: for e in &te.entries {
            for (inst, bit) in t.valids.iter().zip(&e.valid_bits) {
                let valid = p.inst_id(&inst.name).is_some_and(|id| h.contains(id));
                if valid != *bit {
                    continue 'entries;
                }
            }
            // Every non-wildcard key is read, even after a mismatch.
            let mut hit = true;
            for (read, pat) in t.reads.iter().zip(&e.keys) {
                if *pat == KeyPattern::Wildcard {
                    continue;
                }
                let v = eval_expression(p, h, &read.expr)?;
                hit &= pat.matches(&v);
            }
            if hit {
                return Ok(Some((e.action.clone(), e.data.clone())));
            }
        }
        if let Some(d) = &te.default_override {
            return Ok(Some((d.action.clone(), d.data.clone())));
        }
    }
    Ok(t.default_action.as_ref().map(|d| {
        let data = d
            .args
            .iter()
            .filter_map(|a| match a.kind {
                crate::syntax::ExprKind::Value(v) => Some(v),
                _ => None,
            })
            .collect();
        (d.action.name.clone(), data)
    }))
}
