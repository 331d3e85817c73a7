//! Random generators for header types, programs, packets and table entries.
//!
//! Programs are produced as source text over a fixed set of declarations and
//! parsed back, so every generated program also exercises the front end.
//! Command generation tracks the instances valid on every path and mostly
//! reads fields of those, which keeps the acceptance rate of the checker high.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::HeaderType;
use crate::check::{maskable, ActionAssumptions};
use crate::control::{ActionCall, Entry, KeyPattern, TableEntries, TableState};
use crate::interp::{BitStream, Bits};
use crate::syntax::{mask, parse_program, BaseType, FieldDecl, HeaderTypeDecl, Ident, InstId, MatchKind, Program, Span, Value};

/// A random term over instances `0..universe`, built without simplification.
pub fn header_type<R: Rng>(rng: &mut R, universe: u16, depth: u32) -> HeaderType {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..6) {
            0 => HeaderType::zero(),
            1 => HeaderType::one(),
            _ => HeaderType::inst(InstId(rng.gen_range(0..universe))),
        };
    }
    let a = header_type(rng, universe, depth - 1);
    let b = header_type(rng, universe, depth - 1);
    if rng.gen_bool(0.5) {
        HeaderType::concat_raw(a, b)
    } else {
        HeaderType::choice_raw(a, b)
    }
}

pub fn value<R: Rng>(rng: &mut R, ty: BaseType) -> Value {
    match ty {
        BaseType::Bool => Value::Bool(rng.gen()),
        BaseType::Bits(w) => Value::bits(w, rng.gen::<u128>() & mask(w)),
    }
}

pub fn packet<R: Rng>(rng: &mut R, max_bits: usize) -> BitStream {
    let n = rng.gen_range(0..=max_bits);
    BitStream::from_bits((0..n).map(|_| rng.gen::<bool>()).collect::<Bits>())
}

/// A header type with 1 to 6 fields of width 1 to 128.
pub fn header_type_decl<R: Rng>(rng: &mut R) -> HeaderTypeDecl {
    let n = rng.gen_range(1..=6);
    HeaderTypeDecl {
        name: Ident::new("eta", Span::default()),
        fields: (0..n)
            .map(|i| FieldDecl {
                name: Ident::new(format!("f{i}"), Span::default()),
                width: if rng.gen_bool(0.7) { rng.gen_range(1..=16) } else { rng.gen_range(1..=128) },
            })
            .collect(),
    }
}

const DECLS: &str = "
header a_t { f: 4; g: 8 }
header b_t { x: 1; y: 16 }
instance h0: a_t
instance h1: b_t
instance h2: a_t
instance h3: b_t
";

const INSTANCES: [&str; 4] = ["h0", "h1", "h2", "h3"];

fn fields(inst: &str) -> &'static [(&'static str, u32)] {
    match inst {
        "h0" | "h2" => &[("f", 4), ("g", 8)],
        _ => &[("x", 1), ("y", 16)],
    }
}

const WIDTHS: [u32; 4] = [1, 4, 8, 16];

struct Gen<'r, R> {
    rng: &'r mut R,
    /// Probability that a field read ignores the validity tracking.
    reckless: f64,
    /// Action parameters in scope.
    vars: Vec<(String, u32)>,
    tables: Vec<String>,
}

impl<R: Rng> Gen<'_, R> {
    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        xs.choose(self.rng).expect("non-empty")
    }

    fn readable(&mut self, valid: &BTreeSet<&'static str>) -> Vec<&'static str> {
        if self.rng.gen_bool(self.reckless) {
            INSTANCES.to_vec()
        } else {
            valid.iter().copied().collect()
        }
    }

    fn bits_expr(&mut self, w: u32, valid: &BTreeSet<&'static str>, depth: u32) -> String {
        let choice = self.rng.gen_range(0..if depth == 0 { 3 } else { 5 });
        match choice {
            1 => {
                let cands: Vec<(&str, &str)> = self
                    .readable(valid)
                    .into_iter()
                    .flat_map(|h| fields(h).iter().filter(|(_, fw)| *fw == w).map(move |(f, _)| (h, *f)))
                    .collect();
                if let Some((h, f)) = cands.choose(self.rng) {
                    return format!("{h}.{f}");
                }
            }
            2 => {
                let cands: Vec<String> = self.vars.iter().filter(|(_, vw)| *vw == w).map(|(n, _)| n.clone()).collect();
                if let Some(v) = cands.choose(self.rng) {
                    return v.clone();
                }
            }
            3 | 4 => {
                let op = if choice == 3 { "+" } else { "-" };
                let a = self.bits_expr(w, valid, depth - 1);
                let b = self.bits_expr(w, valid, depth - 1);
                return format!("({a} {op} {b})");
            }
            _ => {}
        }
        format!("{}:{w}", self.rng.gen::<u128>() & mask(w))
    }

    fn bool_expr(&mut self, valid: &BTreeSet<&'static str>, depth: u32) -> String {
        match self.rng.gen_range(0..if depth == 0 { 1 } else { 5 }) {
            0 => if self.rng.gen() { "true".into() } else { "false".into() },
            1 => {
                let w = *self.pick(&WIDTHS);
                let op = if self.rng.gen() { "==" } else { "!=" };
                let a = self.bits_expr(w, valid, depth - 1);
                let b = self.bits_expr(w, valid, depth - 1);
                format!("({a} {op} {b})")
            }
            2 | 3 => {
                let op = if self.rng.gen() { "&&" } else { "||" };
                let a = self.bool_expr(valid, depth - 1);
                let b = self.bool_expr(valid, depth - 1);
                format!("({a} {op} {b})")
            }
            _ => format!("!{}", self.bool_expr(valid, depth - 1)),
        }
    }

    fn modify(&mut self, valid: &BTreeSet<&'static str>) -> Option<String> {
        let targets = self.readable(valid);
        let h = *targets.choose(self.rng)?;
        let (f, w) = *self.pick(fields(h));
        Some(format!("{h}.{f} = {}", self.bits_expr(w, valid, 2)))
    }

    /// Commands allowed in action bodies.
    fn action_cmd(&mut self, valid: &mut BTreeSet<&'static str>) -> String {
        let h = *self.pick(&INSTANCES);
        match self.rng.gen_range(0..5) {
            0 => {
                valid.insert(h);
                format!("add({h})")
            }
            1 => {
                valid.remove(h);
                format!("remove({h})")
            }
            _ => self.modify(valid).unwrap_or_else(|| "skip".into()),
        }
    }

    /// A control command; `valid` holds the instances valid on every path.
    fn cmd(&mut self, valid: &mut BTreeSet<&'static str>, depth: u32) -> String {
        let h = *self.pick(&INSTANCES);
        let n = if depth == 0 { 7 } else { 10 };
        match self.rng.gen_range(0..n) {
            0 | 1 => {
                valid.insert(h);
                format!("extract({h})")
            }
            2 => format!("emit({h})"),
            3 => {
                valid.insert(h);
                format!("add({h})")
            }
            4 => {
                valid.remove(h);
                format!("remove({h})")
            }
            5 => match self.tables.choose(self.rng) {
                Some(t) => {
                    // Actions may remove anything; forget what they could touch.
                    let t = t.clone();
                    valid.clear();
                    format!("apply({t})")
                }
                None => "skip".into(),
            },
            6 => self.modify(valid).unwrap_or_else(|| "skip".into()),
            7 => {
                let c = self.bool_expr(valid, 2);
                let (mut v1, mut v2) = (valid.clone(), valid.clone());
                let a = self.block(&mut v1, depth - 1);
                let b = self.block(&mut v2, depth - 1);
                *valid = &v1 & &v2;
                format!("if ({c}) {{ {a} }} else {{ {b} }}")
            }
            _ => {
                let (mut v1, mut v2) = (valid.clone(), valid.clone());
                v1.insert(h);
                v2.remove(h);
                let a = self.block(&mut v1, depth - 1);
                let b = self.block(&mut v2, depth - 1);
                *valid = &v1 & &v2;
                format!("if (valid({h})) {{ {a} }} else {{ {b} }}")
            }
        }
    }

    fn block(&mut self, valid: &mut BTreeSet<&'static str>, depth: u32) -> String {
        let n = self.rng.gen_range(1..=3);
        (0..n).map(|_| self.cmd(valid, depth)).collect::<Vec<_>>().join("; ")
    }
}

/// Source text of a random program. `reckless` is the chance that a field
/// access ignores which headers are known to be valid.
pub fn program_source<R: Rng>(rng: &mut R, reckless: f64) -> String {
    let mut out = String::from(DECLS);
    let n_actions = rng.gen_range(1..=4);
    let mut g = Gen {
        rng,
        reckless,
        vars: Vec::new(),
        tables: Vec::new(),
    };
    let mut actions = Vec::new();
    for i in 0..n_actions {
        let params: Vec<(String, u32)> = (0..g.rng.gen_range(0..=2)).map(|j| (format!("p{j}"), *g.pick(&WIDTHS))).collect();
        g.vars = params.clone();
        // Action bodies may read anything; the table's valid matches cover them.
        let mut valid: BTreeSet<&'static str> = INSTANCES.iter().copied().collect();
        let saved = g.reckless;
        g.reckless = 0.0;
        let body: Vec<String> = (0..g.rng.gen_range(0..=3)).map(|_| g.action_cmd(&mut valid)).collect();
        g.reckless = saved;
        let ps: Vec<String> = params.iter().map(|(n, w)| format!("{n}: {w}")).collect();
        out.push_str(&format!("action a{i}({}) {{ {} }}\n", ps.join(", "), body.join("; ")));
        actions.push((format!("a{i}"), params));
    }
    g.vars.clear();

    for i in 0..g.rng.gen_range(0..=3) {
        let mut valids: Vec<&str> = INSTANCES.iter().copied().filter(|_| g.rng.gen_bool(0.5)).collect();
        valids.sort();
        let mut reads: Vec<String> = valids.iter().map(|h| format!("{h}: valid")).collect();
        for _ in 0..g.rng.gen_range(0..=2) {
            let ternary = !valids.is_empty() && g.rng.gen_bool(0.8);
            let h = if ternary { *g.pick(&valids) } else { *g.pick(&INSTANCES) };
            let (f, _) = *g.pick(fields(h));
            let kind = if ternary { "ternary" } else { "exact" };
            reads.push(format!("{h}.{f}: {kind}"));
        }
        let mut acts: Vec<&(String, Vec<(String, u32)>)> = actions.iter().filter(|_| g.rng.gen_bool(0.6)).collect();
        if acts.is_empty() {
            acts.push(g.pick(&actions));
        }
        let names: Vec<&str> = acts.iter().map(|(n, _)| n.as_str()).collect();
        let mut decl = format!("table t{i} {{ ");
        if !reads.is_empty() {
            decl.push_str(&format!("reads {{ {} }} ", reads.join("; ")));
        }
        decl.push_str(&format!("actions {{ {} }} ", names.join("; ")));
        if g.rng.gen_bool(0.3) {
            let (a, params) = *g.pick(&acts);
            let args: Vec<String> = params.iter().map(|(_, w)| format!("{}:{w}", g.rng.gen::<u128>() & mask(*w))).collect();
            decl.push_str(&format!("default_action: {a}({}) ", args.join(", ")));
        }
        decl.push_str("}\n");
        out.push_str(&decl);
        g.tables.push(format!("t{i}"));
    }

    let mut valid = BTreeSet::new();
    let body = g.block(&mut valid, 3);
    out.push_str(&format!("control {{ {body} }}\n"));
    out
}

pub fn program<R: Rng>(rng: &mut R, reckless: f64) -> Program {
    let src = program_source(rng, reckless);
    match parse_program(&src) {
        Ok(p) => p,
        Err(e) => panic!("generated program does not parse: {e:?}\n{src}"),
    }
}

/// Random entries that satisfy the checker's control-plane assumptions.
pub fn table_state<R: Rng>(rng: &mut R, p: &Program, assumptions: &BTreeMap<String, ActionAssumptions>) -> TableState {
    let mut st = TableState::default();
    for (name, t) in &p.tables {
        let cv = assumptions.get(name).cloned().unwrap_or_default();
        let mut te = TableEntries::default();
        for _ in 0..rng.gen_range(0..=4) {
            let action = t.actions.choose(rng).expect("tables have actions").name.clone();
            let mut valid_bits: Vec<bool> = t.valids.iter().map(|_| rng.gen()).collect();
            let need = cv.for_action(&action);
            for (bit, inst) in valid_bits.iter_mut().zip(&t.valids) {
                let exact_key = t
                    .reads
                    .iter()
                    .any(|r| r.kind == MatchKind::Exact && r.expr.referenced_headers().contains(&inst.name));
                if need.contains(&inst.name) || exact_key {
                    *bit = true;
                }
            }
            let bit = |h: &str| t.valids.iter().position(|v| v.name == h).map(|j| valid_bits[j]);
            let keys = t
                .reads
                .iter()
                .map(|r| {
                    let blocked = r.expr.referenced_headers().iter().any(|h| bit(h) == Some(false));
                    let ty = crate::check::expr_type(p, &r.expr).unwrap_or(BaseType::Bool);
                    let v = value(rng, ty);
                    match (r.kind, v) {
                        (MatchKind::Ternary, _) if blocked || rng.gen_bool(0.3) => KeyPattern::Wildcard,
                        (MatchKind::Ternary, Value::Bits { width, value }) => KeyPattern::Ternary {
                            value,
                            mask: rng.gen::<u128>() & mask(width),
                        },
                        (_, v) => {
                            debug_assert!(!blocked || maskable(t, r));
                            KeyPattern::Exact(v)
                        }
                    }
                })
                .collect();
            let data = p.actions[&action].params.iter().map(|prm| value(rng, prm.ty)).collect();
            te.entries.push(Entry {
                valid_bits,
                keys,
                action,
                data,
                span: Span::default(),
            });
        }
        let free: Vec<&Ident> = t.actions.iter().filter(|a| cv.for_action(&a.name).is_empty()).collect();
        if rng.gen_bool(0.3) {
            if let Some(a) = free.choose(rng) {
                te.default_override = Some(ActionCall {
                    action: a.name.clone(),
                    data: p.actions[&a.name].params.iter().map(|prm| value(rng, prm.ty)).collect(),
                    span: Span::default(),
                });
            }
        }
        st.tables.insert(name.clone(), te);
    }
    st
}
