use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use crate::control::{select_action, TableState};
use crate::syntax::{CmdKind, Command, Expr, ExprKind, Program, Span, Value};

use super::bits::{deserialize, init_value, serialize, BitStream, Bits};
use super::eval::{eval_expression, Fault, HeaderMap};

/// `⟨I, O, H, c⟩`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub input: BitStream,
    pub output: Bits,
    pub headers: HeaderMap,
    pub command: Command,
}

impl Config {
    pub fn new(input: BitStream, command: Command) -> Self {
        Config {
            input,
            output: Bits::new(),
            headers: HeaderMap::default(),
            command,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    Extr,
    Emit,
    EmitInvalid,
    IfValidTrue,
    IfValidFalse,
    Mod,
    Mod1,
    Apply,
    Add,
    AddValid,
    Rem,
    Seq1,
    If,
    IfTrue,
    IfFalse,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Extr => "E-Extr",
            Rule::Emit => "E-Emit",
            Rule::EmitInvalid => "E-EmitInvalid",
            Rule::IfValidTrue => "E-IfValidTrue",
            Rule::IfValidFalse => "E-IfValidFalse",
            Rule::Mod => "E-Mod",
            Rule::Mod1 => "E-Mod1",
            Rule::Apply => "E-Apply",
            Rule::Add => "E-Add",
            Rule::AddValid => "E-AddValid",
            Rule::Rem => "E-Rem",
            Rule::Seq1 => "E-Seq1",
            Rule::If => "E-If",
            Rule::IfTrue => "E-IfTrue",
            Rule::IfFalse => "E-IfFalse",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    /// The axiom that fired. Steps under a sequence (E-Seq) report the rule at the redex.
    pub rule: Rule,
    pub span: Span,
    /// `dom(H)` after the step.
    pub dom: Vec<String>,
}

pub type Trace = Vec<TraceEntry>;

fn is_value(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Value(_))
}

fn value_expr(v: Value, span: Span) -> Expr {
    Expr::new(ExprKind::Value(v), span)
}

fn skip_at(span: Span) -> Command {
    Command::new(CmdKind::Skip, span)
}

/// One reduction step. Returns the rule applied at the redex.
pub fn step(cfg: &mut Config, p: &Program, st: &TableState) -> Result<(Rule, Span), Fault> {
    let cmd = std::mem::take(&mut cfg.command);
    let (next, rule, span) = reduce(cfg, p, st, cmd)?;
    cfg.command = next;
    Ok((rule, span))
}

fn reduce(cfg: &mut Config, p: &Program, st: &TableState, c: Command) -> Result<(Command, Rule, Span), Fault> {
    let span = c.span;
    let lookup = |name: &str| {
        p.inst_id(name).ok_or_else(|| Fault::Stuck {
            reason: format!("unknown instance {name}"),
            span,
        })
    };
    match c.kind {
        CmdKind::Skip => Err(Fault::Stuck {
            reason: "no rule applies to skip".into(),
            span,
        }),
        CmdKind::Seq(a, b) => {
            if a.is_skip() {
                return Ok((*b, Rule::Seq1, span));
            }
            let (a2, rule, inner) = reduce(cfg, p, st, *a)?;
            Ok((Command::new(CmdKind::Seq(Box::new(a2), b), span), rule, inner))
        }
        CmdKind::Extract(h) => {
            let id = lookup(&h.name)?;
            let ht = p.header_type_of(&h.name).map_err(|e| Fault::Stuck { reason: e.to_string(), span })?;
            let rec = deserialize(ht, &mut cfg.input);
            cfg.headers.0.insert(id, rec);
            Ok((skip_at(span), Rule::Extr, span))
        }
        CmdKind::Emit(h) => {
            let id = lookup(&h.name)?;
            match cfg.headers.get(id) {
                Some(rec) => {
                    let ht = p.header_type_of(&h.name).map_err(|e| Fault::Stuck { reason: e.to_string(), span })?;
                    let bits = serialize(ht, rec);
                    cfg.output.extend_from_bitslice(&bits);
                    Ok((skip_at(span), Rule::Emit, span))
                }
                None => Ok((skip_at(span), Rule::EmitInvalid, span)),
            }
        }
        CmdKind::Add(h) => {
            let id = lookup(&h.name)?;
            if cfg.headers.contains(id) {
                return Ok((skip_at(span), Rule::AddValid, span));
            }
            let ht = p.header_type_of(&h.name).map_err(|e| Fault::Stuck { reason: e.to_string(), span })?;
            cfg.headers.0.insert(id, init_value(ht));
            Ok((skip_at(span), Rule::Add, span))
        }
        CmdKind::Remove(h) => {
            let id = lookup(&h.name)?;
            cfg.headers.0.remove(&id);
            Ok((skip_at(span), Rule::Rem, span))
        }
        CmdKind::IfValid { inst, then, els } => {
            let id = lookup(&inst.name)?;
            if cfg.headers.contains(id) {
                Ok((*then, Rule::IfValidTrue, span))
            } else {
                Ok((*els, Rule::IfValidFalse, span))
            }
        }
        CmdKind::If { cond, then, els } => {
            if !is_value(&cond) {
                let v = eval_expression(p, &cfg.headers, &cond)?;
                let cond = value_expr(v, cond.span);
                return Ok((Command::new(CmdKind::If { cond, then, els }, span), Rule::If, span));
            }
            match cond.kind {
                ExprKind::Value(Value::Bool(true)) => Ok((*then, Rule::IfTrue, span)),
                ExprKind::Value(Value::Bool(false)) => Ok((*els, Rule::IfFalse, span)),
                _ => Err(Fault::Stuck {
                    reason: "condition is not a boolean".into(),
                    span,
                }),
            }
        }
        CmdKind::Modify { inst, field, value } => {
            if !is_value(&value) {
                let v = eval_expression(p, &cfg.headers, &value)?;
                let value = value_expr(v, value.span);
                return Ok((Command::new(CmdKind::Modify { inst, field, value }, span), Rule::Mod1, span));
            }
            let ExprKind::Value(v) = value.kind else { unreachable!() };
            let id = lookup(&inst.name)?;
            let lhs = inst.span.to(field.span);
            let ht = p.header_type_of(&inst.name).map_err(|e| Fault::Stuck { reason: e.to_string(), span })?;
            let headers = &mut cfg.headers;
            if !headers.contains(id) {
                return Err(Fault::invalid(p, &inst.name, lhs, headers));
            }
            let (i, _) = ht.field(&field.name).ok_or_else(|| Fault::Stuck {
                reason: format!("unknown field {}", field.name),
                span,
            })?;
            if let Some(rec) = headers.0.get_mut(&id) {
                rec.values[i] = v;
            }
            Ok((skip_at(span), Rule::Mod, span))
        }
        CmdKind::Apply(t) => {
            let table = p.table(&t.name).map_err(|e| Fault::Stuck { reason: e.to_string(), span })?;
            let body = match select_action(p, table, &cfg.headers, st)? {
                Some((action, data)) => {
                    let decl = p.action(&action).map_err(|e| Fault::Stuck { reason: e.to_string(), span })?;
                    let env: IndexMap<String, Value> =
                        decl.params.iter().map(|prm| prm.name.name.clone()).zip(data).collect();
                    decl.body.substitute(&env)
                }
                None => skip_at(span),
            };
            Ok((body, Rule::Apply, span))
        }
    }
}

/// Final state of a run. `fault` is set when execution stopped early.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: Config,
    pub trace: Trace,
    pub fault: Option<Fault>,
}

impl RunResult {
    pub fn completed(&self) -> bool {
        self.fault.is_none() && self.config.command.is_skip()
    }
}

/// Step `p.body` on `packet` until it reaches skip or faults.
pub fn run(p: &Program, packet: BitStream, st: &TableState) -> RunResult {
    let mut cfg = Config::new(packet, p.body.clone());
    let mut trace = Trace::new();
    let mut fault = None;
    while !cfg.command.is_skip() {
        match step(&mut cfg, p, st) {
            Ok((rule, span)) => trace.push(TraceEntry {
                rule,
                span,
                dom: cfg.headers.dom_names(p),
            }),
            Err(f) => {
                fault = Some(f);
                break;
            }
        }
    }
    RunResult {
        config: cfg,
        trace,
        fault,
    }
}

/// Trace as text, one step per line.
pub fn format_trace(trace: &Trace, src: &crate::syntax::SourceFile) -> String {
    let mut out = String::new();
    for t in trace {
        let lc = src.line_col(t.span);
        out.push_str(&format!("{:<15} line {:>4}  {{{}}}\n", t.rule.to_string(), lc.line, t.dom.join(",")));
    }
    out
}
