use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;

use crate::diagnostics::{Diagnostic, DiagnosticKind};

use super::ast::*;
use super::parser::{parse_decls, RawDecl};
use super::span::Span;

/// Parse and resolve a program. All resolution problems are reported together.
pub fn parse_program(src: &str) -> Result<Program, Vec<Diagnostic>> {
    let decls = parse_decls(src).map_err(|d| vec![d])?;
    resolve(decls)
}

struct Resolver {
    diags: Vec<Diagnostic>,
    global: HashMap<String, Span>,
}

impl Resolver {
    fn err(&mut self, kind: DiagnosticKind, msg: String, span: Span) {
        self.diags.push(Diagnostic::error(kind, msg, span));
    }

    fn declare(&mut self, name: &Ident) -> bool {
        if self.global.contains_key(&name.name) {
            self.err(DiagnosticKind::Duplicate, format!("duplicate declaration {}", name.name), name.span);
            false
        } else {
            self.global.insert(name.name.clone(), name.span);
            true
        }
    }
}

pub fn resolve(decls: Vec<RawDecl>) -> Result<Program, Vec<Diagnostic>> {
    let mut r = Resolver {
        diags: Vec::new(),
        global: HashMap::new(),
    };
    let mut p = Program::default();
    let mut control: Option<Span> = None;

    for d in decls {
        match d {
            RawDecl::HeaderType(h) => {
                let mut seen = BTreeSet::new();
                for f in &h.fields {
                    if !seen.insert(f.name.name.clone()) {
                        r.err(
                            DiagnosticKind::Duplicate,
                            format!("duplicate field {} in {}", f.name.name, h.name.name),
                            f.name.span,
                        );
                    }
                }
                if h.fields.is_empty() {
                    r.err(DiagnosticKind::Malformed, format!("header type {} has no fields", h.name), h.name.span);
                }
                if r.declare(&h.name) {
                    p.header_types.insert(h.name.name.clone(), h);
                }
            }
            RawDecl::Instance(i) => {
                if r.declare(&i.name) {
                    p.instances.insert(i.name.name.clone(), i);
                }
            }
            RawDecl::Action(a) => {
                if r.declare(&a.name) {
                    p.actions.insert(a.name.name.clone(), a);
                }
            }
            RawDecl::Table(t) => {
                if r.declare(&t.name) {
                    p.tables.insert(t.name.name.clone(), t);
                }
            }
            RawDecl::Control(body, span) => {
                if control.is_some() {
                    r.err(DiagnosticKind::Duplicate, "duplicate control block".to_string(), span);
                } else {
                    control = Some(span);
                    p.body = body;
                }
            }
        }
    }
    if p.instances.len() > u16::MAX as usize {
        r.err(DiagnosticKind::Malformed, "too many instances".to_string(), Span::default());
    }

    for inst in p.instances.values() {
        if !p.header_types.contains_key(&inst.header_type.name) {
            r.err(
                DiagnosticKind::UnknownName,
                format!("unknown header type {}", inst.header_type.name),
                inst.header_type.span,
            );
        }
    }
    // Later checks look up field types, so bail out if instances are broken.
    if !r.diags.is_empty() {
        return Err(r.diags);
    }

    for a in p.actions.values() {
        let mut params = IndexMap::new();
        for prm in &a.params {
            if r.global.contains_key(&prm.name.name) {
                r.err(
                    DiagnosticKind::Duplicate,
                    format!("parameter {} shadows a global name", prm.name.name),
                    prm.name.span,
                );
            }
            if params.insert(prm.name.name.clone(), prm.ty).is_some() {
                r.err(DiagnosticKind::Duplicate, format!("duplicate parameter {}", prm.name.name), prm.name.span);
            }
        }
        if !a.body.is_action_body() {
            r.err(
                DiagnosticKind::Malformed,
                format!("action {} may only use add, remove, field assignment and skip", a.name),
                a.body.span,
            );
        }
        check_command(&p, &mut r, &a.body, &params);
    }

    let no_vars = IndexMap::new();
    for t in p.tables.values() {
        let mut seen = BTreeSet::new();
        for h in &t.valids {
            check_instance(&p, &mut r, h);
            if !seen.insert(h.name.clone()) {
                r.err(DiagnosticKind::Duplicate, format!("duplicate valid match {}", h.name), h.span);
            }
        }
        for rd in &t.reads {
            check_expr(&p, &mut r, &rd.expr, &no_vars);
        }
        let mut seen = BTreeSet::new();
        for a in &t.actions {
            if !p.actions.contains_key(&a.name) {
                r.err(DiagnosticKind::UnknownName, format!("unknown action {}", a.name), a.span);
            }
            if !seen.insert(a.name.clone()) {
                r.err(DiagnosticKind::Duplicate, format!("action {} listed twice", a.name), a.span);
            }
        }
        if let Some(d) = &t.default_action {
            if !t.actions.iter().any(|a| a.name == d.action.name) {
                r.err(
                    DiagnosticKind::UnknownName,
                    format!("default action {} is not an action of table {}", d.action, t.name),
                    d.action.span,
                );
            } else if let Some(act) = p.actions.get(&d.action.name) {
                if act.params.len() != d.args.len() {
                    r.err(
                        DiagnosticKind::Arity,
                        format!(
                            "action {} takes {} arguments but {} were given",
                            act.name,
                            act.params.len(),
                            d.args.len()
                        ),
                        d.span,
                    );
                } else {
                    for (prm, arg) in act.params.iter().zip(&d.args) {
                        match &arg.kind {
                            ExprKind::Value(v) if v.ty() == prm.ty => {}
                            ExprKind::Value(v) => r.err(
                                DiagnosticKind::TypeMismatch,
                                format!("argument for {} has type {}, expected {}", prm.name, v.ty(), prm.ty),
                                arg.span,
                            ),
                            _ => r.err(
                                DiagnosticKind::Malformed,
                                "default action data must be literal values".to_string(),
                                arg.span,
                            ),
                        }
                    }
                }
            }
        }
    }

    let body = std::mem::take(&mut p.body);
    check_command(&p, &mut r, &body, &no_vars);
    p.body = body;

    if r.diags.is_empty() {
        Ok(p)
    } else {
        Err(r.diags)
    }
}

fn check_instance(p: &Program, r: &mut Resolver, h: &Ident) -> bool {
    if p.instances.contains_key(&h.name) {
        true
    } else {
        r.err(DiagnosticKind::UnknownName, format!("unknown instance {}", h.name), h.span);
        false
    }
}

fn check_field(p: &Program, r: &mut Resolver, h: &Ident, f: &Ident) {
    if check_instance(p, r, h) {
        if let Err(e) = p.field_type(&h.name, &f.name) {
            r.err(DiagnosticKind::UnknownName, e.to_string(), f.span);
        }
    }
}

fn check_expr(p: &Program, r: &mut Resolver, e: &Expr, vars: &IndexMap<String, BaseType>) {
    match &e.kind {
        ExprKind::Value(_) => {}
        ExprKind::Field { inst, field } => check_field(p, r, inst, field),
        ExprKind::Var(x) => {
            if !vars.contains_key(&x.name) {
                r.err(DiagnosticKind::UnknownName, format!("unbound variable {}", x.name), x.span);
            }
        }
        ExprKind::App { op, args } => {
            if args.len() != op.arity() {
                r.err(
                    DiagnosticKind::Arity,
                    format!("operator {} takes {} operands", op.symbol(), op.arity()),
                    e.span,
                );
            }
            args.iter().for_each(|a| check_expr(p, r, a, vars));
        }
    }
}

fn check_command(p: &Program, r: &mut Resolver, c: &Command, vars: &IndexMap<String, BaseType>) {
    match &c.kind {
        CmdKind::Skip => {}
        CmdKind::Extract(h) | CmdKind::Emit(h) | CmdKind::Add(h) | CmdKind::Remove(h) => {
            check_instance(p, r, h);
        }
        CmdKind::Apply(t) => {
            if !p.tables.contains_key(&t.name) {
                r.err(DiagnosticKind::UnknownName, format!("unknown table {}", t.name), t.span);
            }
        }
        CmdKind::Modify { inst, field, value } => {
            check_field(p, r, inst, field);
            check_expr(p, r, value, vars);
        }
        CmdKind::Seq(a, b) => {
            check_command(p, r, a, vars);
            check_command(p, r, b, vars);
        }
        CmdKind::If { cond, then, els } => {
            check_expr(p, r, cond, vars);
            check_command(p, r, then, vars);
            check_command(p, r, els, vars);
        }
        CmdKind::IfValid { inst, then, els } => {
            check_instance(p, r, inst);
            check_command(p, r, then, vars);
            check_command(p, r, els, vars);
        }
    }
}
