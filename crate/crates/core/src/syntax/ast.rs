use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use super::span::Span;

/// Dense index of a declared header instance, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct InstId(pub u16);

impl InstId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BaseType {
    Bool,
    Bits(u32),
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseType::Bool => f.write_str("bool"),
            BaseType::Bits(w) => write!(f, "bit<{w}>"),
        }
    }
}

pub const MAX_WIDTH: u32 = 128;

/// Runtime and literal values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Value {
    Bool(bool),
    Bits { width: u32, value: u128 },
}

impl Value {
    pub fn bits(width: u32, value: u128) -> Value {
        Value::Bits {
            width,
            value: value & mask(width),
        }
    }

    pub fn ty(&self) -> BaseType {
        match self {
            Value::Bool(_) => BaseType::Bool,
            Value::Bits { width, .. } => BaseType::Bits(*width),
        }
    }

    pub fn zero(ty: BaseType) -> Value {
        match ty {
            BaseType::Bool => Value::Bool(false),
            BaseType::Bits(w) => Value::bits(w, 0),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Bits { width, value } => write!(f, "{value}:{width}"),
        }
    }
}

pub fn mask(width: u32) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Op {
    Eq,
    Ne,
    And,
    Or,
    Not,
    Add,
    Sub,
}

impl Op {
    pub fn arity(self) -> usize {
        match self {
            Op::Not => 1,
            _ => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Eq => "==",
            Op::Ne => "!=",
            Op::And => "&&",
            Op::Or => "||",
            Op::Not => "!",
            Op::Add => "+",
            Op::Sub => "-",
        }
    }

    /// Binding strength for printing and parsing; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            Op::Or => 1,
            Op::And => 2,
            Op::Eq | Op::Ne => 3,
            Op::Add | Op::Sub => 4,
            Op::Not => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Value(Value),
    Field { inst: Ident, field: Ident },
    Var(Ident),
    App { op: Op, args: Vec<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn value(v: Value) -> Self {
        Expr::new(ExprKind::Value(v), Span::default())
    }

    pub fn field(inst: &str, field: &str) -> Self {
        Expr::new(
            ExprKind::Field {
                inst: Ident::new(inst, Span::default()),
                field: Ident::new(field, Span::default()),
            },
            Span::default(),
        )
    }

    pub fn var(name: &str) -> Self {
        Expr::new(ExprKind::Var(Ident::new(name, Span::default())), Span::default())
    }

    pub fn app(op: Op, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::App { op, args }, Span::default())
    }

    /// Instance names occurring in field references of this expression.
    pub fn referenced_headers(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_headers(&mut out);
        out
    }

    fn collect_headers(&self, out: &mut BTreeSet<String>) {
        match &self.kind {
            ExprKind::Field { inst, .. } => {
                out.insert(inst.name.clone());
            }
            ExprKind::App { args, .. } => args.iter().for_each(|a| a.collect_headers(out)),
            ExprKind::Value(_) | ExprKind::Var(_) => {}
        }
    }

    /// Replace variables by values. Parameter names are fresh, so no capture can occur.
    pub fn substitute(&self, env: &IndexMap<String, Value>) -> Expr {
        let kind = match &self.kind {
            ExprKind::Var(x) => match env.get(&x.name) {
                Some(v) => ExprKind::Value(*v),
                None => ExprKind::Var(x.clone()),
            },
            ExprKind::App { op, args } => ExprKind::App {
                op: *op,
                args: args.iter().map(|a| a.substitute(env)).collect(),
            },
            other => other.clone(),
        };
        Expr::new(kind, self.span)
    }

    /// Structural equality ignoring spans.
    pub fn same_shape(&self, other: &Expr) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Value(a), ExprKind::Value(b)) => a == b,
            (ExprKind::Field { inst: h1, field: f1 }, ExprKind::Field { inst: h2, field: f2 }) => {
                h1.name == h2.name && f1.name == f2.name
            }
            (ExprKind::Var(a), ExprKind::Var(b)) => a.name == b.name,
            (ExprKind::App { op: o1, args: a1 }, ExprKind::App { op: o2, args: a2 }) => {
                o1 == o2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| x.same_shape(y))
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Command {
    pub kind: CmdKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CmdKind {
    Skip,
    Extract(Ident),
    Emit(Ident),
    Add(Ident),
    Remove(Ident),
    Apply(Ident),
    Modify { inst: Ident, field: Ident, value: Expr },
    Seq(Box<Command>, Box<Command>),
    If { cond: Expr, then: Box<Command>, els: Box<Command> },
    IfValid { inst: Ident, then: Box<Command>, els: Box<Command> },
}

impl Command {
    pub fn new(kind: CmdKind, span: Span) -> Self {
        Command { kind, span }
    }

    pub fn skip() -> Self {
        Command::new(CmdKind::Skip, Span::default())
    }

    pub fn is_skip(&self) -> bool {
        matches!(self.kind, CmdKind::Skip)
    }

    /// Right-nested sequence of `cmds`; `Skip` when empty.
    pub fn seq(cmds: Vec<Command>) -> Command {
        let mut iter = cmds.into_iter().rev();
        let Some(mut acc) = iter.next() else {
            return Command::skip();
        };
        for c in iter {
            let span = c.span.to(acc.span);
            acc = Command::new(CmdKind::Seq(Box::new(c), Box::new(acc)), span);
        }
        acc
    }

    /// The commands of the top-level sequence spine, in order.
    pub fn spine(&self) -> Vec<&Command> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match &cur.kind {
                CmdKind::Seq(a, b) => {
                    out.extend(a.spine());
                    cur = b;
                }
                _ => {
                    out.push(cur);
                    return out;
                }
            }
        }
    }

    pub fn substitute(&self, env: &IndexMap<String, Value>) -> Command {
        let kind = match &self.kind {
            CmdKind::Modify { inst, field, value } => CmdKind::Modify {
                inst: inst.clone(),
                field: field.clone(),
                value: value.substitute(env),
            },
            CmdKind::Seq(a, b) => CmdKind::Seq(Box::new(a.substitute(env)), Box::new(b.substitute(env))),
            CmdKind::If { cond, then, els } => CmdKind::If {
                cond: cond.substitute(env),
                then: Box::new(then.substitute(env)),
                els: Box::new(els.substitute(env)),
            },
            CmdKind::IfValid { inst, then, els } => CmdKind::IfValid {
                inst: inst.clone(),
                then: Box::new(then.substitute(env)),
                els: Box::new(els.substitute(env)),
            },
            other => other.clone(),
        };
        Command::new(kind, self.span)
    }

    /// Whether every command in this tree is allowed inside an action body.
    pub fn is_action_body(&self) -> bool {
        match &self.kind {
            CmdKind::Skip | CmdKind::Add(_) | CmdKind::Remove(_) | CmdKind::Modify { .. } => true,
            CmdKind::Seq(a, b) => a.is_action_body() && b.is_action_body(),
            _ => false,
        }
    }

    /// Instance names mentioned anywhere in the command, including field reads.
    pub fn mentioned_headers(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_mentions(&mut out);
        out
    }

    fn collect_mentions(&self, out: &mut BTreeSet<String>) {
        match &self.kind {
            CmdKind::Skip | CmdKind::Apply(_) => {}
            CmdKind::Extract(h) | CmdKind::Emit(h) | CmdKind::Add(h) | CmdKind::Remove(h) => {
                out.insert(h.name.clone());
            }
            CmdKind::Modify { inst, value, .. } => {
                out.insert(inst.name.clone());
                out.extend(value.referenced_headers());
            }
            CmdKind::Seq(a, b) => {
                a.collect_mentions(out);
                b.collect_mentions(out);
            }
            CmdKind::If { cond, then, els } => {
                out.extend(cond.referenced_headers());
                then.collect_mentions(out);
                els.collect_mentions(out);
            }
            CmdKind::IfValid { inst, then, els } => {
                out.insert(inst.name.clone());
                then.collect_mentions(out);
                els.collect_mentions(out);
            }
        }
    }

    /// Instances whose fields the command reads or writes.
    pub fn accessed_headers(&self) -> BTreeSet<String> {
        match &self.kind {
            CmdKind::Modify { inst, value, .. } => {
                let mut out = value.referenced_headers();
                out.insert(inst.name.clone());
                out
            }
            CmdKind::Seq(a, b) => a.accessed_headers().union(&b.accessed_headers()).cloned().collect(),
            CmdKind::If { cond, then, els } => {
                let mut out = cond.referenced_headers();
                out.extend(then.accessed_headers());
                out.extend(els.accessed_headers());
                out
            }
            CmdKind::IfValid { then, els, .. } => then.accessed_headers().union(&els.accessed_headers()).cloned().collect(),
            _ => BTreeSet::new(),
        }
    }

    /// Instances the command adds on every path (`add` commands in straight-line code).
    pub fn always_adds(&self) -> BTreeSet<String> {
        match &self.kind {
            CmdKind::Add(h) | CmdKind::Extract(h) => [h.name.clone()].into(),
            CmdKind::Seq(a, b) => {
                let mut s = a.always_adds();
                for h in b.removes() {
                    s.remove(&h);
                }
                s.extend(b.always_adds());
                s
            }
            _ => BTreeSet::new(),
        }
    }

    fn removes(&self) -> BTreeSet<String> {
        match &self.kind {
            CmdKind::Remove(h) => [h.name.clone()].into(),
            CmdKind::Seq(a, b) => a.removes().union(&b.removes()).cloned().collect(),
            _ => BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: Ident,
    pub width: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeaderTypeDecl {
    pub name: Ident,
    pub fields: Vec<FieldDecl>,
}

impl HeaderTypeDecl {
    pub fn field(&self, name: &str) -> Option<(usize, &FieldDecl)> {
        self.fields.iter().enumerate().find(|(_, f)| f.name.name == name)
    }

    pub fn total_width(&self) -> usize {
        self.fields.iter().map(|f| f.width as usize).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDecl {
    pub name: Ident,
    pub header_type: Ident,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: Ident,
    pub ty: BaseType,
}

/// `λx̄:τ̄. c`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MatchKind {
    Exact,
    Ternary,
}

impl fmt::Display for MatchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchKind::Exact => "exact",
            MatchKind::Ternary => "ternary",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Read {
    pub expr: Expr,
    pub kind: MatchKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefaultAction {
    pub action: Ident,
    pub args: Vec<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDecl {
    pub name: Ident,
    pub valids: Vec<Ident>,
    pub reads: Vec<Read>,
    pub actions: Vec<Ident>,
    pub default_action: Option<DefaultAction>,
}

impl TableDecl {
    pub fn is_valid_match(&self, inst: &str) -> bool {
        self.valids.iter().any(|h| h.name == inst)
    }

    /// Instances that appear in the valid matches or in any reads expression.
    pub fn referenced_instances(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.valids.iter().map(|h| h.name.clone()).collect();
        for r in &self.reads {
            out.extend(r.expr.referenced_headers());
        }
        out
    }
}

/// A resolved program: declarations grouped by namespace, each in source order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub header_types: IndexMap<String, HeaderTypeDecl>,
    pub instances: IndexMap<String, InstanceDecl>,
    pub actions: IndexMap<String, ActionDecl>,
    pub tables: IndexMap<String, TableDecl>,
    pub body: Command,
}

impl Default for Command {
    fn default() -> Self {
        Command::skip()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LookupError {
    #[error("unknown instance {0}")]
    UnknownInstance(String),
    #[error("unknown field {field} on {header_type}")]
    UnknownField { header_type: String, field: String },
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("unknown table {0}")]
    UnknownTable(String),
}

impl Program {
    pub fn inst_id(&self, name: &str) -> Option<InstId> {
        self.instances.get_index_of(name).map(|i| InstId(i as u16))
    }

    pub fn inst_name(&self, id: InstId) -> &str {
        self.instances
            .get_index(id.index())
            .map(|(k, _)| k.as_str())
            .unwrap_or("?")
    }

    pub fn instance_names(&self) -> Vec<String> {
        self.instances.keys().cloned().collect()
    }

    pub fn header_type_of(&self, inst: &str) -> Result<&HeaderTypeDecl, LookupError> {
        let decl = self
            .instances
            .get(inst)
            .ok_or_else(|| LookupError::UnknownInstance(inst.to_string()))?;
        self.header_types
            .get(&decl.header_type.name)
            .ok_or_else(|| LookupError::UnknownInstance(inst.to_string()))
    }

    /// `𝓕(h, f)`
    pub fn field_type(&self, inst: &str, field: &str) -> Result<BaseType, LookupError> {
        let ht = self.header_type_of(inst)?;
        ht.field(field)
            .map(|(_, f)| BaseType::Bits(f.width))
            .ok_or_else(|| LookupError::UnknownField {
                header_type: ht.name.name.clone(),
                field: field.to_string(),
            })
    }

    pub fn action(&self, name: &str) -> Result<&ActionDecl, LookupError> {
        self.actions
            .get(name)
            .ok_or_else(|| LookupError::UnknownAction(name.to_string()))
    }

    pub fn table(&self, name: &str) -> Result<&TableDecl, LookupError> {
        self.tables
            .get(name)
            .ok_or_else(|| LookupError::UnknownTable(name.to_string()))
    }
}
