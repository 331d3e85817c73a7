use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::InstSet;
use crate::syntax::{mask, Expr, ExprKind, InstId, Op, Program, Span, Value};

use super::bits::FieldRecord;

/// `H`: the valid instances and their field values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HeaderMap(pub BTreeMap<InstId, FieldRecord>);

impl HeaderMap {
    pub fn contains(&self, h: InstId) -> bool {
        self.0.contains_key(&h)
    }

    pub fn get(&self, h: InstId) -> Option<&FieldRecord> {
        self.0.get(&h)
    }

    pub fn dom(&self) -> InstSet {
        self.0.keys().copied().collect()
    }

    pub fn dom_names(&self, p: &Program) -> Vec<String> {
        self.0.keys().map(|h| p.inst_name(*h).to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Fault {
    #[error("access to invalid header {instance}")]
    InvalidAccess {
        instance: String,
        span: Span,
        dom: Vec<String>,
    },
    #[error("evaluation stuck: {reason}")]
    Stuck { reason: String, span: Span },
}

impl Fault {
    pub fn span(&self) -> Span {
        match self {
            Fault::InvalidAccess { span, .. } | Fault::Stuck { span, .. } => *span,
        }
    }

    pub(crate) fn invalid(p: &Program, inst: &str, span: Span, h: &HeaderMap) -> Fault {
        Fault::InvalidAccess {
            instance: inst.to_string(),
            span,
            dom: h.dom_names(p),
        }
    }
}

fn stuck(reason: impl Into<String>, span: Span) -> Fault {
    Fault::Stuck {
        reason: reason.into(),
        span,
    }
}

/// `⟨H, e⟩ →* v`. All operands are evaluated, so every field read is checked.
pub fn eval_expression(p: &Program, h: &HeaderMap, e: &Expr) -> Result<Value, Fault> {
    match &e.kind {
        ExprKind::Value(v) => Ok(*v),
        ExprKind::Var(x) => Err(stuck(format!("unbound variable {}", x.name), e.span)),
        ExprKind::Field { inst, field } => {
            let id = p.inst_id(&inst.name).ok_or_else(|| stuck(format!("unknown instance {}", inst.name), e.span))?;
            let rec = h.get(id).ok_or_else(|| Fault::invalid(p, &inst.name, e.span, h))?;
            let ht = p.header_type_of(&inst.name).map_err(|err| stuck(err.to_string(), e.span))?;
            rec.get(ht, &field.name)
                .ok_or_else(|| stuck(format!("unknown field {}", field.name), field.span))
        }
        ExprKind::App { op, args } => {
            let vals = args
                .iter()
                .map(|a| eval_expression(p, h, a))
                .collect::<Result<Vec<_>, _>>()?;
            apply_op(*op, &vals).ok_or_else(|| stuck(format!("ill-typed operands for {}", op.symbol()), e.span))
        }
    }
}

/// `⟦k⟧(v̄)`
pub fn apply_op(op: Op, vals: &[Value]) -> Option<Value> {
    use Value::*;
    match (op, vals) {
        (Op::Eq, [a, b]) if a.ty() == b.ty() => Some(Bool(a == b)),
        (Op::Ne, [a, b]) if a.ty() == b.ty() => Some(Bool(a != b)),
        (Op::And, [Bool(a), Bool(b)]) => Some(Bool(*a && *b)),
        (Op::Or, [Bool(a), Bool(b)]) => Some(Bool(*a || *b)),
        (Op::Not, [Bool(a)]) => Some(Bool(!a)),
        (Op::Add, [Bits { width: w1, value: a }, Bits { width: w2, value: b }]) if w1 == w2 => {
            Some(Value::bits(*w1, a.wrapping_add(*b) & mask(*w1)))
        }
        (Op::Sub, [Bits { width: w1, value: a }, Bits { width: w2, value: b }]) if w1 == w2 => {
            Some(Value::bits(*w1, a.wrapping_sub(*b) & mask(*w1)))
        }
        _ => None,
    }
}
