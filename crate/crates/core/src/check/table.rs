use std::collections::BTreeSet;

use crate::algebra::HeaderType;
use crate::diagnostics::Provenance;
use crate::syntax::{pretty_expr, InstId, MatchKind, Program, Read, Span, TableDecl};

use super::checker::Checker;
use super::*;

/// A reads key the control plane can wildcard whenever its headers are matched invalid.
pub fn maskable(t: &TableDecl, read: &Read) -> bool {
    match read.kind {
        MatchKind::Exact => false,
        MatchKind::Ternary => read.expr.referenced_headers().iter().all(|h| t.is_valid_match(h)),
    }
}

pub fn referenced_ids(p: &Program, names: &BTreeSet<String>) -> BTreeSet<InstId> {
    names.iter().filter_map(|n| p.inst_id(n)).collect()
}

impl Checker<'_> {
    /// Grow each action's assumed-valid set until its body checks or the
    /// failing header cannot be matched by the table.
    pub fn infer_table(&mut self, theta: &HeaderType, t: &TableDecl) -> ActionAssumptions {
        let saved = self.provenance.clone();
        let mut out = ActionAssumptions::default();
        for a in &t.actions {
            let Some(action) = self.p.actions.get(&a.name) else { continue };
            self.provenance = Provenance::TableAction {
                table: t.name.name.clone(),
                action: a.name.clone(),
            };
            let mut assumed: Vec<InstId> = Vec::new();
            loop {
                let mut trial = self.trial();
                let input = trial.compact(theta.restrict_all(&assumed));
                trial.action_body(&TypeEnv::new(), input, action);
                let next = trial.sites.iter().map(|s| s.inst).find(|h| {
                    !assumed.contains(h) && t.is_valid_match(self.p.inst_name(*h))
                });
                match next {
                    Some(h) => {
                        assumed.push(h);
                        self.warn(
                            format!(
                                "assuming {} matched as valid for rules with action {}",
                                self.p.inst_name(h),
                                a.name
                            ),
                            a.span,
                        );
                    }
                    None => break,
                }
            }
            out.assumed_valid.insert(
                a.name.clone(),
                assumed.iter().map(|h| self.p.inst_name(*h).to_string()).collect(),
            );
        }
        self.provenance = saved;
        out
    }

    /// T-Apply.
    pub fn apply(&mut self, theta: HeaderType, t: &TableDecl, span: Span) -> HeaderType {
        let saved = self.provenance.clone();
        let table = t.name.name.clone();

        self.provenance = Provenance::TableReads { table: table.clone() };
        for read in &t.reads {
            if maskable(t, read) {
                for h in read.expr.referenced_headers() {
                    let included = self.p.inst_id(&h).is_some_and(|id| theta.includes(id));
                    if !included {
                        self.warn(
                            format!(
                                "assuming either {h} matched as valid or {} wildcarded",
                                pretty_expr(&read.expr)
                            ),
                            read.expr.span,
                        );
                    }
                }
            } else {
                self.expr(&TypeEnv::new(), &theta, &read.expr);
            }
        }
        self.provenance = saved.clone();

        let assumptions = match &self.opts.fixed_assumptions {
            Some(fixed) => fixed.get(&table).cloned().unwrap_or_default(),
            None => self.infer_table(&theta, t),
        };
        self.assumptions.entry(table.clone()).or_default().merge(&assumptions);

        let mut outs = Vec::new();
        for a in &t.actions {
            let Some(action) = self.p.actions.get(&a.name) else { continue };
            let assumed = referenced_ids(self.p, &assumptions.for_action(&a.name));
            self.provenance = Provenance::TableAction {
                table: table.clone(),
                action: a.name.clone(),
            };
            let input = self.compact(theta.restrict_all(&assumed));
            outs.push(self.action_body(&TypeEnv::new(), input, action));
        }
        match &t.default_action {
            Some(d) => {
                if let Some(action) = self.p.actions.get(&d.action.name) {
                    // The default runs on a miss, so no validity can be assumed.
                    self.provenance = Provenance::TableDefault {
                        table: table.clone(),
                        action: d.action.name.clone(),
                    };
                    outs.push(self.action_body(&TypeEnv::new(), theta.clone(), action));
                }
            }
            None => outs.push(theta.clone()),
        }
        self.provenance = saved;

        let mut always: Option<BTreeSet<String>> = None;
        for a in &t.actions {
            if let Some(action) = self.p.actions.get(&a.name) {
                let adds = action.body.always_adds();
                always = Some(match always {
                    None => adds,
                    Some(prev) => prev.intersection(&adds).cloned().collect(),
                });
            }
        }
        self.applies.push(ApplyEvent {
            table,
            span,
            top_index: self.top_index,
            timeline: self.timeline,
            always_adds: always.unwrap_or_default(),
            has_default: t.default_action.is_some(),
        });
        HeaderType::sum(outs)
    }
}
