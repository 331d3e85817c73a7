//! The typing judgement `Γ;Θ ⊢ c : Θ′`, with table application, control-plane
//! validity inference and error recovery.

mod checker;
mod table;

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::Serialize;

use crate::algebra::{HeaderType, DEFAULT_MAX_DENOTATION};
use crate::diagnostics::{Diagnostic, Provenance};
use crate::syntax::{ActionDecl, BaseType, Command, Expr, InstId, Program, Span, TableDecl};

pub use table::{maskable, referenced_ids};

use checker::Checker;

/// `Γ`: variable typing.
pub type TypeEnv = IndexMap<String, BaseType>;

/// `𝓒𝓥(t)`: per action, the instances the control plane must match as valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ActionAssumptions {
    pub assumed_valid: IndexMap<String, BTreeSet<String>>,
}

impl ActionAssumptions {
    pub fn for_action(&self, action: &str) -> BTreeSet<String> {
        self.assumed_valid.get(action).cloned().unwrap_or_default()
    }

    fn merge(&mut self, other: &ActionAssumptions) {
        for (a, s) in &other.assumed_valid {
            self.assumed_valid.entry(a.clone()).or_default().extend(s.iter().cloned());
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Largest denotation computed when simplifying or classifying.
    pub max_denotation: usize,
    /// Terms larger than this are rebuilt from their denotation.
    pub compact_threshold: usize,
    /// Use these assumptions instead of inferring them.
    pub fixed_assumptions: Option<BTreeMap<String, ActionAssumptions>>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_denotation: DEFAULT_MAX_DENOTATION,
            compact_threshold: 512,
            fixed_assumptions: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    /// Before a command executes.
    Entry,
    /// After both branches of a conditional.
    Join,
    /// End of the program.
    Exit,
}

#[derive(Debug, Clone)]
pub struct PointType {
    pub span: Span,
    pub kind: PointKind,
    pub ty: HeaderType,
}

/// Where an invalid-header error was raised, with the context the classifier needs.
#[derive(Debug, Clone)]
pub struct ValiditySite {
    /// Index into `CheckResult::diagnostics`.
    pub diag: usize,
    pub inst: InstId,
    pub span: Span,
    pub provenance: Provenance,
    /// Type in force at the faulting reference.
    pub site_type: HeaderType,
    /// Index of the enclosing top-level command.
    pub top_index: usize,
    /// Position in checking order.
    pub timeline: usize,
}

#[derive(Debug, Clone)]
pub struct ApplyEvent {
    pub table: String,
    pub span: Span,
    pub top_index: usize,
    pub timeline: usize,
    /// Instances added on every path by every action of the table.
    pub always_adds: BTreeSet<String>,
    pub has_default: bool,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub output_type: HeaderType,
    pub diagnostics: Vec<Diagnostic>,
    pub point_types: Vec<PointType>,
    pub assumptions: BTreeMap<String, ActionAssumptions>,
    pub sites: Vec<ValiditySite>,
    pub applies: Vec<ApplyEvent>,
}

impl CheckResult {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| !d.is_error())
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    pub fn is_ok(&self) -> bool {
        self.error_count() == 0
    }
}

/// Check the program body from the initial type `1`, then classify errors.
pub fn check_program(p: &Program) -> CheckResult {
    check_program_with(p, &CheckOptions::default())
}

pub fn check_program_with(p: &Program, opts: &CheckOptions) -> CheckResult {
    let mut c = Checker::new(p, opts, true);
    let mut theta = HeaderType::one();
    for (i, cmd) in p.body.spine().into_iter().enumerate() {
        c.top_index = i;
        theta = c.cmd(&TypeEnv::new(), theta, cmd);
    }
    let end = Span::new(p.body.span.end, p.body.span.end);
    c.point(end, PointKind::Exit, &theta);
    let mut result = c.finish(theta);
    crate::diagnostics::classify_all(p, &mut result, opts.max_denotation);
    result
}

/// `Γ;Θ ⊢ c : Θ′` for an arbitrary command and input type.
pub fn check_command(p: &Program, env: &TypeEnv, theta: &HeaderType, cmd: &Command, opts: &CheckOptions) -> CheckResult {
    let mut c = Checker::new(p, opts, true);
    let out = c.cmd(env, theta.clone(), cmd);
    c.finish(out)
}

/// Expression typing; `None` when the expression is ill-typed.
pub fn check_expression(p: &Program, env: &TypeEnv, theta: &HeaderType, e: &Expr) -> (Option<BaseType>, Vec<Diagnostic>) {
    let opts = CheckOptions::default();
    let mut c = Checker::new(p, &opts, false);
    let ty = c.expr(env, theta, e);
    (ty, c.finish(theta.clone()).diagnostics)
}

/// Type of a closed expression, ignoring header validity.
pub fn expr_type(p: &Program, e: &Expr) -> Option<BaseType> {
    let all = HeaderType::product((0..p.instances.len()).map(|i| HeaderType::inst(InstId(i as u16))));
    check_expression(p, &TypeEnv::new(), &all, e).0
}

/// Action typing: the parameter types and the output type of the body.
pub fn check_action(
    p: &Program,
    env: &TypeEnv,
    theta: &HeaderType,
    a: &ActionDecl,
) -> (Vec<BaseType>, HeaderType, Vec<Diagnostic>) {
    let opts = CheckOptions::default();
    let mut c = Checker::new(p, &opts, false);
    let out = c.action_body(env, theta.clone(), a);
    let result = c.finish(out);
    (a.params.iter().map(|prm| prm.ty).collect(), result.output_type, result.diagnostics)
}

/// `𝓒𝓥(t)` under input type `theta`, with the assumption warnings.
pub fn infer_control_validity(p: &Program, theta: &HeaderType, t: &TableDecl) -> (ActionAssumptions, Vec<Diagnostic>) {
    let opts = CheckOptions::default();
    let mut c = Checker::new(p, &opts, false);
    let a = c.infer_table(theta, t);
    (a, c.finish(theta.clone()).diagnostics)
}

/// T-Apply for one table application.
pub fn check_table_apply(p: &Program, theta: &HeaderType, t: &TableDecl, opts: &CheckOptions) -> CheckResult {
    let mut c = Checker::new(p, opts, false);
    let out = c.apply(theta.clone(), t, t.name.span);
    c.finish(out)
}

#[cfg(test)]
mod tests;
