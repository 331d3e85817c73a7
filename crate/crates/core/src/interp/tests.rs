use crate::control::{load_entries, TableState};
use crate::syntax::{parse_program, Program, Value};

use super::*;

const DECLS: &str = "
header eta { f: 3; g: 2 }
header byte_t { b: 8 }
instance x: eta
instance y: byte_t
instance z: byte_t
action set_b(v: 8) { y.b = v; add(z) }
table t { reads { y: valid } actions { set_b } }
";

fn program(body: &str) -> Program {
    parse_program(&format!("{DECLS}\ncontrol {{ {body} }}")).unwrap()
}

fn exec(body: &str, bits: &str) -> RunResult {
    let p = program(body);
    run(&p, BitStream::from_bits(bits.chars().map(|c| c == '1').collect()), &TableState::default())
}

fn rules(r: &RunResult) -> Vec<Rule> {
    r.trace.iter().map(|t| t.rule).collect()
}

#[test]
fn extract_then_emit() {
    let r = exec("extract(x); emit(x)", "11000101");
    assert!(r.completed());
    assert_eq!(to_bit_string(&r.config.output), "11000");
    assert_eq!(to_bit_string(r.config.input.remaining()), "101");
    assert_eq!(rules(&r), [Rule::Extr, Rule::Seq1, Rule::Emit]);
}

#[test]
fn emit_invalid_is_noop() {
    let r = exec("emit(y)", "");
    assert!(r.completed());
    assert!(r.config.output.is_empty());
    assert_eq!(rules(&r), [Rule::EmitInvalid]);
}

#[test]
fn add_keeps_existing_values() {
    let r = exec("extract(y); add(y); emit(y)", "10101010");
    assert_eq!(to_bit_string(&r.config.output), "10101010");
    assert!(rules(&r).contains(&Rule::AddValid));

    let r = exec("add(y); emit(y)", "1111");
    assert_eq!(to_bit_string(&r.config.output), "00000000");
    assert!(rules(&r).contains(&Rule::Add));
}

#[test]
fn remove_shrinks_domain() {
    let r = exec("extract(y); extract(z); remove(y)", "");
    let p = program("skip");
    assert_eq!(r.config.headers.dom_names(&p), ["z"]);
    assert_eq!(r.trace.last().unwrap().dom, ["z"]);
    assert_eq!(r.config.input.zero_extended, 16);
}

#[test]
fn domain_tracks_validity() {
    let r = exec("extract(x); if (valid(y)) { remove(x) } else { add(z) }", "");
    assert!(r.completed());
    let p = program("skip");
    assert_eq!(r.config.headers.dom_names(&p), ["x", "z"]);
    assert_eq!(rules(&r), [Rule::Extr, Rule::Seq1, Rule::IfValidFalse, Rule::Add]);
}

#[test]
fn conditional_evaluates_in_one_step() {
    let r = exec("extract(y); if (y.b == 0xff:8) { y.b = y.b - 1:8 } else { skip }; emit(y)", "11111111");
    assert!(r.completed());
    assert_eq!(to_bit_string(&r.config.output), "11111110");
    let rs = rules(&r);
    assert!(rs.contains(&Rule::If) && rs.contains(&Rule::IfTrue));
    assert!(rs.contains(&Rule::Mod1) && rs.contains(&Rule::Mod));
}

#[test]
fn unsafe_program_faults() {
    let r = exec("extract(x); y.b = 1:8", "");
    assert!(!r.completed());
    match r.fault {
        Some(Fault::InvalidAccess { instance, dom, .. }) => {
            assert_eq!(instance, "y");
            assert_eq!(dom, ["x"]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn apply_runs_selected_action() {
    let p = program("extract(y); apply(t); emit(z)");
    let st = load_entries("table t: valids=1 -> set_b(7)", &p).unwrap();
    let r = run(&p, BitStream::from_bytes(&[0xff]), &st);
    assert!(r.completed());
    let y = r.config.headers.get(p.inst_id("y").unwrap()).unwrap();
    assert_eq!(y.values, vec![Value::bits(8, 7)]);
    assert_eq!(to_hex(&r.config.output), "00");
    assert!(rules(&r).contains(&Rule::Apply));

    // A miss with no default does nothing.
    let r = run(&p, BitStream::from_bytes(&[0xff]), &TableState::default());
    assert!(r.completed());
    assert!(r.config.output.is_empty());
}

#[test]
fn deterministic() {
    let a = exec("extract(x); extract(y); if (y.b != 0:8) { remove(x) } else { skip }", "0101010101010");
    let b = exec("extract(x); extract(y); if (y.b != 0:8) { remove(x) } else { skip }", "0101010101010");
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.config, b.config);
}
