use std::collections::BTreeMap;

use crate::algebra::{denote_capped, from_denotation, HeaderType};
use crate::diagnostics::{Diagnostic, DiagnosticKind, Provenance};
use crate::syntax::{ActionDecl, BaseType, CmdKind, Command, Expr, ExprKind, Ident, Op, Program, Span};

use super::*;

pub(super) struct Checker<'p> {
    pub p: &'p Program,
    pub opts: &'p CheckOptions,
    pub diags: Vec<Diagnostic>,
    pub sites: Vec<ValiditySite>,
    pub points: Vec<PointType>,
    pub assumptions: BTreeMap<String, ActionAssumptions>,
    pub applies: Vec<ApplyEvent>,
    pub provenance: Provenance,
    pub top_index: usize,
    pub timeline: usize,
    record_points: bool,
    cap_reported: bool,
}

impl<'p> Checker<'p> {
    pub fn new(p: &'p Program, opts: &'p CheckOptions, record_points: bool) -> Self {
        Checker {
            p,
            opts,
            diags: Vec::new(),
            sites: Vec::new(),
            points: Vec::new(),
            assumptions: BTreeMap::new(),
            applies: Vec::new(),
            provenance: Provenance::Control,
            top_index: 0,
            timeline: 0,
            record_points,
            cap_reported: false,
        }
    }

    /// A scratch checker for trial runs during assumption inference.
    pub fn trial(&self) -> Checker<'p> {
        let mut c = Checker::new(self.p, self.opts, false);
        c.provenance = self.provenance.clone();
        c.cap_reported = true;
        c
    }

    pub fn finish(self, output_type: HeaderType) -> CheckResult {
        let mut diagnostics = Vec::with_capacity(self.diags.len());
        let mut remap = Vec::with_capacity(self.diags.len());
        for d in self.diags {
            let dup = !d.is_error() && diagnostics.iter().any(|e: &Diagnostic| e.span == d.span && e.message == d.message);
            if dup {
                remap.push(usize::MAX);
            } else {
                remap.push(diagnostics.len());
                diagnostics.push(d);
            }
        }
        let sites = self
            .sites
            .into_iter()
            .map(|mut s| {
                s.diag = remap[s.diag];
                s
            })
            .collect();
        CheckResult {
            output_type,
            diagnostics,
            point_types: self.points,
            assumptions: self.assumptions,
            sites,
            applies: self.applies,
        }
    }

    pub fn point(&mut self, span: Span, kind: PointKind, ty: &HeaderType) {
        if self.record_points {
            self.points.push(PointType { span, kind, ty: ty.clone() });
        }
    }

    pub fn error(&mut self, kind: DiagnosticKind, msg: String, span: Span) {
        let d = Diagnostic::error(kind, msg, span).with_provenance(self.provenance.clone());
        self.diags.push(d);
    }

    pub fn warn(&mut self, msg: String, span: Span) {
        let d = Diagnostic::warning(DiagnosticKind::Assumption, msg, span).with_provenance(self.provenance.clone());
        self.diags.push(d);
    }

    /// Rebuild large terms as a sum of products over their denotation.
    pub fn compact(&mut self, t: HeaderType) -> HeaderType {
        if t.size() <= self.opts.compact_threshold {
            return t;
        }
        match denote_capped(&t, self.opts.max_denotation) {
            Ok(d) => {
                let c = from_denotation(&d);
                if c.size() < t.size() {
                    c
                } else {
                    t
                }
            }
            Err(e) => {
                if !self.cap_reported {
                    self.cap_reported = true;
                    let d = Diagnostic::warning(
                        DiagnosticKind::ResourceLimit,
                        format!("{e}; continuing without simplification"),
                        Span::default(),
                    );
                    self.diags.push(d);
                }
                t
            }
        }
    }

    /// T-Mod and T-Field premise: `Includes Θ h`.
    pub fn require_valid(&mut self, theta: &HeaderType, inst: &Ident, span: Span) {
        let Some(h) = self.p.inst_id(&inst.name) else {
            self.error(DiagnosticKind::UnknownName, format!("unknown instance {}", inst.name), inst.span);
            return;
        };
        if theta.includes(h) {
            return;
        }
        let diag = self.diags.len();
        let d = Diagnostic::error(
            DiagnosticKind::InvalidHeader,
            format!("{} not guaranteed to be valid", inst.name),
            span,
        )
        .with_instance(inst.name.clone())
        .with_provenance(self.provenance.clone());
        self.diags.push(d);
        self.sites.push(ValiditySite {
            diag,
            inst: h,
            span,
            provenance: self.provenance.clone(),
            site_type: theta.clone(),
            top_index: self.top_index,
            timeline: self.timeline,
        });
    }

    pub fn cmd(&mut self, env: &TypeEnv, theta: HeaderType, c: &Command) -> HeaderType {
        if let CmdKind::Seq(a, b) = &c.kind {
            let mid = self.cmd(env, theta, a);
            return self.cmd(env, mid, b);
        }
        self.timeline += 1;
        if !c.is_skip() {
            self.point(c.span, PointKind::Entry, &theta);
        }
        // T-Zero: an empty input type admits any command; the least output is 0.
        if theta.is_empty() {
            return HeaderType::zero();
        }
        let out = match &c.kind {
            CmdKind::Skip => theta,
            CmdKind::Seq(..) => unreachable!(),
            CmdKind::Extract(h) | CmdKind::Add(h) => match self.p.inst_id(&h.name) {
                Some(id) => HeaderType::concat(theta, HeaderType::inst(id)),
                None => {
                    self.error(DiagnosticKind::UnknownName, format!("unknown instance {}", h.name), h.span);
                    theta
                }
            },
            CmdKind::Emit(_) => theta,
            CmdKind::Remove(h) => match self.p.inst_id(&h.name) {
                Some(id) => theta.remove(id),
                None => {
                    self.error(DiagnosticKind::UnknownName, format!("unknown instance {}", h.name), h.span);
                    theta
                }
            },
            CmdKind::Modify { inst, field, value } => {
                let lhs = inst.span.to(field.span);
                self.require_valid(&theta, inst, lhs);
                let vt = self.expr(env, &theta, value);
                match self.p.field_type(&inst.name, &field.name) {
                    Ok(ft) => {
                        if let Some(vt) = vt {
                            if vt != ft {
                                self.error(
                                    DiagnosticKind::TypeMismatch,
                                    format!("type mismatch: {}.{} has type {ft} but the value has type {vt}", inst, field),
                                    value.span,
                                );
                            }
                        }
                    }
                    Err(e) => self.error(DiagnosticKind::UnknownName, e.to_string(), field.span),
                }
                theta
            }
            CmdKind::If { cond, then, els } => {
                if let Some(t) = self.expr(env, &theta, cond) {
                    if t != BaseType::Bool {
                        self.error(
                            DiagnosticKind::TypeMismatch,
                            format!("type mismatch: condition has type {t}, expected bool"),
                            cond.span,
                        );
                    }
                }
                let t1 = self.cmd(env, theta.clone(), then);
                let t2 = self.cmd(env, theta, els);
                let out = HeaderType::choice(t1, t2);
                self.point(Span::new(c.span.end, c.span.end), PointKind::Join, &out);
                out
            }
            CmdKind::IfValid { inst, then, els } => match self.p.inst_id(&inst.name) {
                Some(h) => {
                    let pos = self.compact(theta.restrict(h));
                    let neg = self.compact(theta.neg_restrict(h));
                    let t1 = self.cmd(env, pos, then);
                    let t2 = self.cmd(env, neg, els);
                    let out = HeaderType::choice(t1, t2);
                    self.point(Span::new(c.span.end, c.span.end), PointKind::Join, &out);
                    out
                }
                None => {
                    self.error(DiagnosticKind::UnknownName, format!("unknown instance {}", inst.name), inst.span);
                    theta
                }
            },
            CmdKind::Apply(t) => match self.p.tables.get(&t.name) {
                Some(table) => self.apply(theta, table, c.span),
                None => {
                    self.error(DiagnosticKind::UnknownName, format!("unknown table {}", t.name), t.span);
                    theta
                }
            },
        };
        self.compact(out)
    }

    /// T-Const, T-Var and T-Field.
    pub fn expr(&mut self, env: &TypeEnv, theta: &HeaderType, e: &Expr) -> Option<BaseType> {
        match &e.kind {
            ExprKind::Value(v) => Some(v.ty()),
            ExprKind::Var(x) => match env.get(&x.name) {
                Some(t) => Some(*t),
                None => {
                    self.error(DiagnosticKind::UnknownName, format!("unbound variable {}", x.name), x.span);
                    None
                }
            },
            ExprKind::Field { inst, field } => {
                self.require_valid(theta, inst, e.span);
                match self.p.field_type(&inst.name, &field.name) {
                    Ok(t) => Some(t),
                    Err(err) => {
                        self.error(DiagnosticKind::UnknownName, err.to_string(), field.span);
                        None
                    }
                }
            }
            ExprKind::App { op, args } => {
                let tys: Vec<Option<BaseType>> = args.iter().map(|a| self.expr(env, theta, a)).collect();
                if tys.len() != op.arity() {
                    self.error(
                        DiagnosticKind::Arity,
                        format!("operator {} takes {} operands", op.symbol(), op.arity()),
                        e.span,
                    );
                    return None;
                }
                let known: Option<Vec<BaseType>> = tys.into_iter().collect();
                let known = known?;
                let result = match op {
                    Op::Eq | Op::Ne if known[0] == known[1] => Some(BaseType::Bool),
                    Op::And | Op::Or | Op::Not if known.iter().all(|t| *t == BaseType::Bool) => Some(BaseType::Bool),
                    Op::Add | Op::Sub if known[0] == known[1] && matches!(known[0], BaseType::Bits(_)) => Some(known[0]),
                    _ => None,
                };
                if result.is_none() {
                    let shown: Vec<String> = known.iter().map(|t| t.to_string()).collect();
                    self.error(
                        DiagnosticKind::TypeMismatch,
                        format!("type mismatch: operator {} cannot take {}", op.symbol(), shown.join(" and ")),
                        e.span,
                    );
                }
                result
            }
        }
    }

    /// T-Action: the body under Γ extended with the parameters. Program points
    /// are only recorded in the control body.
    pub fn action_body(&mut self, env: &TypeEnv, theta: HeaderType, a: &ActionDecl) -> HeaderType {
        let mut env = env.clone();
        for prm in &a.params {
            env.insert(prm.name.name.clone(), prm.ty);
        }
        let record = std::mem::replace(&mut self.record_points, false);
        let out = self.cmd(&env, theta, &a.body);
        self.record_points = record;
        out
    }
}
