use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hvc::gen;
use hvc::syntax::{parse_expr, parse_program, pretty_expr, pretty_program, CmdKind, Command, Expr, ExprKind, Op, Value};

const INSTS: [&str; 3] = ["eth", "ipv4", "tcp"];

/// Leaves paired with the instances they mention.
fn expr() -> impl Strategy<Value = (Expr, BTreeSet<String>)> {
    let leaf = prop_oneof![
        (1u32..=32, any::<u32>()).prop_map(|(w, v)| {
            (Expr::value(Value::bits(w, v as u128 & hvc::syntax::mask(w))), BTreeSet::new())
        }),
        any::<bool>().prop_map(|b| (Expr::value(Value::Bool(b)), BTreeSet::new())),
        (0..INSTS.len(), "[a-z]{1,3}").prop_map(|(i, f)| (Expr::field(INSTS[i], &f), [INSTS[i].to_string()].into())),
        "v[a-z]{0,2}".prop_map(|v| (Expr::var(&v), BTreeSet::new())),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        let bin = prop_oneof![
            Just(Op::Eq),
            Just(Op::Ne),
            Just(Op::And),
            Just(Op::Or),
            Just(Op::Add),
            Just(Op::Sub)
        ];
        prop_oneof![
            inner.clone().prop_map(|(e, hs)| (Expr::app(Op::Not, vec![e]), hs)),
            (bin, inner.clone(), inner).prop_map(|(op, (a, ha), (b, hb))| {
                (Expr::app(op, vec![a, b]), ha.union(&hb).cloned().collect())
            }),
        ]
    })
}

/// Fully parenthesized rendering that ignores spans.
fn sexpr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Value(v) => format!("{v:?}"),
        ExprKind::Field { inst, field } => format!("{}.{}", inst.name, field.name),
        ExprKind::Var(v) => v.name.clone(),
        ExprKind::App { op, args } => {
            let args: Vec<String> = args.iter().map(sexpr).collect();
            format!("({} {})", op.symbol(), args.join(" "))
        }
    }
}

fn commands(c: &Command, out: &mut Vec<Command>) {
    out.push(c.clone());
    match &c.kind {
        CmdKind::Seq(a, b) | CmdKind::If { then: a, els: b, .. } | CmdKind::IfValid { then: a, els: b, .. } => {
            commands(a, out);
            commands(b, out);
        }
        _ => {}
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn expressions_print_and_parse_back((e, _) in expr()) {
        let text = pretty_expr(&e);
        let back = parse_expr(&text).unwrap_or_else(|d| panic!("`{text}`: {d:?}"));
        prop_assert_eq!(sexpr(&back), sexpr(&e), "{}", text);
    }

    #[test]
    fn referenced_headers_are_the_field_instances((e, hs) in expr()) {
        prop_assert_eq!(e.referenced_headers(), hs);
    }

    #[test]
    fn generated_programs_pretty_print_to_a_fixpoint(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = gen::program_source(&mut rng, 0.2);
        let p = parse_program(&src).unwrap_or_else(|d| panic!("{src}\n{d:?}"));
        let once = pretty_program(&p);
        let p2 = parse_program(&once).unwrap_or_else(|d| panic!("{once}\n{d:?}"));
        prop_assert_eq!(pretty_program(&p2), once);
    }

    #[test]
    fn command_spans_cover_their_keyword(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = gen::program_source(&mut rng, 0.2);
        let p = parse_program(&src).expect("generated program parses");
        let mut cmds = Vec::new();
        commands(&p.body, &mut cmds);
        for c in cmds {
            let keyword = match &c.kind {
                CmdKind::Extract(_) => "extract",
                CmdKind::Emit(_) => "emit",
                CmdKind::Add(_) => "add",
                CmdKind::Remove(_) => "remove",
                CmdKind::Apply(_) => "apply",
                CmdKind::If { .. } => "if",
                _ => continue,
            };
            prop_assert!(c.span.end <= src.len());
            prop_assert!(src[c.span.start..].starts_with(keyword), "{:?} at {}", c.kind, c.span.start);
        }
    }
}

#[test]
fn undeclared_instances_are_rejected_with_a_location() {
    let src = "header a_t { f: 4 }\ninstance a: a_t\ncontrol { extract(b) }\n";
    let errs = parse_program(src).expect_err("unknown instance");
    assert!(errs.iter().any(|d| d.message.contains('b') && d.span.start >= src.find("control").unwrap()));
}

#[test]
fn syntax_errors_are_reported() {
    assert!(parse_program("header a_t { f: 4 }\ncontrol { extract( }").is_err());
    assert!(parse_expr("1 +").is_err());
}
