//! Bug categories for invalid-header errors, and folding of symptom sites
//! into root causes.
//!
//! Heuristics, tried in order for each error:
//! 1. a reads key over an instance the table also matches for validity: table reads;
//! 2. an action body reference to an instance that some sibling action does not
//!    access, where that sibling accesses an instance this action does not: table
//!    action;
//! 3. inside a table's declared default, or after an earlier application of a
//!    table without default whose actions all add the instance: default action;
//! 4. otherwise look at the alternatives reaching the site. If every alternative
//!    lacking the instance is a prefix (subset) of one that has it, a parse path
//!    stopped early and fell through: parser. Otherwise the site runs in a context
//!    the instance was never part of: control.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{denote_capped, InstSet};
use crate::check::{CheckResult, ValiditySite};
use crate::syntax::{Program, Span};

use super::{BugCategory, Provenance};

pub fn classify_site(p: &Program, result: &CheckResult, site: &ValiditySite, cap: usize) -> BugCategory {
    let h = p.inst_name(site.inst);
    match &site.provenance {
        Provenance::TableReads { table } => {
            if p.tables.get(table).is_some_and(|t| t.is_valid_match(h)) {
                return BugCategory::TableReadsBug;
            }
        }
        Provenance::TableAction { table, action } => {
            if let (Some(t), Some(own)) = (p.tables.get(table), p.actions.get(action)) {
                let own = own.body.accessed_headers();
                let sibling_without = t.actions.iter().filter(|a| a.name != *action).any(|a| {
                    p.actions.get(&a.name).is_some_and(|decl| {
                        let other = decl.body.accessed_headers();
                        !other.contains(h) && !other.is_subset(&own)
                    })
                });
                if sibling_without {
                    return BugCategory::TableActionBug;
                }
            }
        }
        Provenance::TableDefault { .. } => return BugCategory::DefaultActionBug,
        Provenance::Control => {}
    }
    let after_wrapper = result
        .applies
        .iter()
        .any(|e| e.timeline < site.timeline && !e.has_default && e.always_adds.contains(h));
    if after_wrapper {
        return BugCategory::DefaultActionBug;
    }
    let Ok(d) = denote_capped(&site.site_type, cap) else {
        return BugCategory::Unclassified;
    };
    let (with, without): (Vec<&InstSet>, Vec<&InstSet>) = d.iter().partition(|s| s.contains(site.inst));
    if with.is_empty() {
        return BugCategory::Unclassified;
    }
    let early_exit = without.iter().all(|s| with.iter().any(|w| s.is_subset(w)));
    if early_exit {
        BugCategory::ParserBug
    } else {
        BugCategory::ControlBug
    }
}

/// Give every error a category; warnings stay uncategorized.
pub fn classify_all(p: &Program, result: &mut CheckResult, cap: usize) {
    let mut cats: Vec<Option<BugCategory>> = result
        .diagnostics
        .iter()
        .map(|d| d.is_error().then_some(BugCategory::Unclassified))
        .collect();
    for site in &result.sites {
        if site.diag < cats.len() {
            cats[site.diag] = Some(classify_site(p, result, site, cap));
        }
    }
    for (d, c) in result.diagnostics.iter_mut().zip(cats) {
        d.category = c;
    }
}

/// One root cause with the error sites it explains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BugRecord {
    pub category: BugCategory,
    pub instance: Option<String>,
    pub table: Option<String>,
    /// Indices into the diagnostics list.
    pub diagnostics: Vec<usize>,
    pub spans: Vec<Span>,
}

/// Fold classified errors into bug records, one per fix site.
pub fn fold_bugs(p: &Program, result: &CheckResult) -> Vec<BugRecord> {
    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    enum Key {
        Instance(BugCategory, String),
        Table(BugCategory, String),
        Control(String, usize),
        Lone(usize),
    }
    let site_of: BTreeMap<usize, &ValiditySite> = result.sites.iter().map(|s| (s.diag, s)).collect();

    // Control bugs on the same instance fold while their top-level commands are adjacent.
    let mut control_runs: BTreeMap<(String, usize), usize> = BTreeMap::new();
    let mut by_inst: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, d) in result.diagnostics.iter().enumerate() {
        if d.category == Some(BugCategory::ControlBug) {
            if let Some(s) = site_of.get(&i) {
                by_inst.entry(p.inst_name(s.inst).to_string()).or_default().push(s.top_index);
            }
        }
    }
    for (h, mut idxs) in by_inst {
        idxs.sort_unstable();
        idxs.dedup();
        let mut run_start = idxs[0];
        let mut prev = idxs[0];
        for i in idxs {
            if i > prev + 1 {
                run_start = i;
            }
            control_runs.insert((h.clone(), i), run_start);
            prev = i;
        }
    }

    let mut groups: BTreeMap<Key, BugRecord> = BTreeMap::new();
    let mut order: Vec<Key> = Vec::new();
    for (i, d) in result.diagnostics.iter().enumerate() {
        let Some(cat) = d.category else { continue };
        let site = site_of.get(&i);
        let inst = site.map(|s| p.inst_name(s.inst).to_string());
        let table = site.and_then(|s| s.provenance.table().map(str::to_string));
        let key = match (cat, site) {
            (BugCategory::ParserBug, Some(_)) => Key::Instance(cat, inst.clone().unwrap_or_default()),
            (BugCategory::ControlBug, Some(s)) => {
                let h = inst.clone().unwrap_or_default();
                let run = control_runs.get(&(h.clone(), s.top_index)).copied().unwrap_or(s.top_index);
                Key::Control(h, run)
            }
            (BugCategory::TableReadsBug | BugCategory::TableActionBug, Some(_)) if table.is_some() => {
                Key::Table(cat, table.clone().unwrap_or_default())
            }
            (BugCategory::DefaultActionBug, Some(_)) => Key::Instance(cat, inst.clone().unwrap_or_default()),
            _ => Key::Lone(i),
        };
        let table = if matches!(key, Key::Table(..) | Key::Lone(_)) { table } else { None };
        let inst = if matches!(key, Key::Table(..)) { None } else { inst };
        let rec = groups.entry(key).or_insert_with_key(|k| {
            order.push(match k {
                Key::Instance(c, s) => Key::Instance(*c, s.clone()),
                Key::Table(c, s) => Key::Table(*c, s.clone()),
                Key::Control(s, n) => Key::Control(s.clone(), *n),
                Key::Lone(n) => Key::Lone(*n),
            });
            BugRecord {
                category: cat,
                instance: inst.clone(),
                table: table.clone(),
                diagnostics: Vec::new(),
                spans: Vec::new(),
            }
        });
        rec.diagnostics.push(i);
        rec.spans.push(d.span);
    }
    order.into_iter().filter_map(|k| groups.remove(&k)).collect()
}
