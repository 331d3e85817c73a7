use std::collections::BTreeMap;

use crate::check::ActionAssumptions;
use crate::diagnostics::{Diagnostic, DiagnosticKind};
use crate::syntax::{Program, Value};

use super::{KeyPattern, TableState};

fn well_typed(p: &Program, action: &str, data: &[Value]) -> Result<(), String> {
    let decl = p.action(action).map_err(|e| e.to_string())?;
    if decl.params.len() != data.len() {
        return Err(format!(
            "action {action} takes {} arguments but {} were given",
            decl.params.len(),
            data.len()
        ));
    }
    for (prm, v) in decl.params.iter().zip(data) {
        if prm.ty != v.ty() {
            return Err(format!("{} expects {} but got {}", prm.name.name, prm.ty, v.ty()));
        }
    }
    Ok(())
}

/// Entries that break the assumptions the checker made about the control
/// plane. Each diagnostic points at the offending entry.
pub fn validate_well_behaved(
    p: &Program,
    st: &TableState,
    assumptions: &BTreeMap<String, ActionAssumptions>,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (name, te) in &st.tables {
        let Some(t) = p.tables.get(name) else {
            out.push(Diagnostic::error(
                DiagnosticKind::ControlPlane,
                format!("entries for unknown table {name}"),
                Default::default(),
            ));
            continue;
        };
        let cv = assumptions.get(name).cloned().unwrap_or_default();
        for (i, e) in te.entries.iter().enumerate() {
            let mut bad = |msg: String| {
                out.push(Diagnostic::error(
                    DiagnosticKind::ControlPlane,
                    format!("table {name} entry {i}: {msg}"),
                    e.span,
                ))
            };
            if !t.actions.iter().any(|a| a.name == e.action) {
                bad(format!("action {} is not an action of the table", e.action));
                continue;
            }
            if e.valid_bits.len() != t.valids.len() || e.keys.len() != t.reads.len() {
                bad("wrong number of valid bits or keys".into());
                continue;
            }
            let bit = |h: &str| t.valids.iter().position(|v| v.name == h).map(|j| e.valid_bits[j]);
            for (read, pat) in t.reads.iter().zip(&e.keys) {
                if *pat == KeyPattern::Wildcard {
                    continue;
                }
                for h in read.expr.referenced_headers() {
                    if bit(&h) == Some(false) {
                        bad(format!("key on {h} must be wildcarded when {h} is matched invalid"));
                    }
                }
            }
            if let Err(m) = well_typed(p, &e.action, &e.data) {
                bad(m);
            }
            for h in cv.for_action(&e.action) {
                if bit(&h) != Some(true) {
                    bad(format!("action {} needs {h} matched as valid", e.action));
                }
            }
        }
        if let Some(d) = &te.default_override {
            let mut bad = |msg: String| {
                out.push(Diagnostic::error(
                    DiagnosticKind::ControlPlane,
                    format!("table {name} default: {msg}"),
                    d.span,
                ))
            };
            if !t.actions.iter().any(|a| a.name == d.action) {
                bad(format!("action {} is not an action of the table", d.action));
            } else {
                if let Err(m) = well_typed(p, &d.action, &d.data) {
                    bad(m);
                }
                let need = cv.for_action(&d.action);
                if !need.is_empty() {
                    let list: Vec<_> = need.into_iter().collect();
                    bad(format!("action {} assumes {} valid and cannot be a default", d.action, list.join(", ")));
                }
            }
        }
    }
    out
}
