use crate::algebra::{denote, parse_notation, HeaderType, InstSet};
use crate::diagnostics::DiagnosticKind;
use crate::syntax::{parse_command, parse_expr, parse_program, BaseType, Program};

use super::*;

const DECLS: &str = "
header ethernet_t { dstAddr: 48; srcAddr: 48; etherType: 16 }
header vlan_t { vid: 12; etherType: 16 }
header ipv4_t { ttl: 8; protocol: 8; dstAddr: 32 }
header tcp_t { syn: 1 }
header nc_value_t { value: 32 }
instance eth: ethernet_t
instance vlan: vlan_t
instance ipv4: ipv4_t
instance tcp: tcp_t
instance nc_value_1: nc_value_t
instance vlan0: vlan_t
instance vlan1: vlan_t
action next_hop(src: 48, dst: 48) { eth.srcAddr = src; eth.dstAddr = dst }
action remove_vlan() { eth.etherType = vlan.etherType; remove(vlan) }
action nop() { }
action add_value_header_1_act() { add(nc_value_1) }
action set_vid0(v: 12) { vlan0.vid = v }
table add_value_header_1 { actions { add_value_header_1_act } }
table add_value_header_1_fixed { actions { add_value_header_1_act } default_action: add_value_header_1_act() }
table pvm_exact {
    reads { vlan0: valid; vlan1: valid; vlan0.vid: exact; vlan1.vid: exact }
    actions { nop }
}
table pvm_ternary {
    reads { vlan0: valid; vlan1: valid; vlan0.vid: ternary; vlan1.vid: ternary }
    actions { nop }
}
table fwd { reads { ipv4: valid; vlan: valid } actions { next_hop; remove_vlan } }
table plain { actions { next_hop } }
";

fn program() -> Program {
    parse_program(DECLS).unwrap()
}

fn ty(p: &Program, s: &str) -> HeaderType {
    parse_notation(s, &|n| p.inst_id(n)).unwrap()
}

fn set(p: &Program, names: &[&str]) -> InstSet {
    names.iter().map(|n| p.inst_id(n).unwrap()).collect()
}

fn check(p: &Program, theta: &str, cmd: &str) -> CheckResult {
    let c = parse_command(cmd).unwrap();
    check_command(p, &TypeEnv::new(), &ty(p, theta), &c, &CheckOptions::default())
}

#[test]
fn extract_concatenates() {
    let p = program();
    let r = check(&p, "eth", "extract(ipv4)");
    assert!(r.is_ok());
    assert_eq!(r.output_type, ty(&p, "eth.ipv4"));
}

#[test]
fn modify_of_optional_header_fails() {
    let p = program();
    let r = check(&p, "eth.(ipv4 + 1)", "ipv4.ttl = 5:8");
    let msgs: Vec<_> = r.errors().map(|d| d.message.as_str()).collect();
    assert_eq!(msgs, ["ipv4 not guaranteed to be valid"]);
}

#[test]
fn if_valid_refines() {
    let p = program();
    let r = check(&p, "eth.(vlan + 1)", "if (valid(vlan)) { vlan.vid = 3:12 }");
    assert!(r.is_ok());
    assert_eq!(denote(&r.output_type).unwrap(), [set(&p, &["eth", "vlan"]), set(&p, &["eth"])].into());
}

#[test]
fn empty_input_type_checks_anything() {
    let p = program();
    let r = check(&p, "0", "tcp.syn = 1:1; extract(eth)");
    assert!(r.is_ok());
    assert!(r.output_type.is_zero());
}

#[test]
fn expression_typing() {
    let p = program();
    let (t, ds) = check_expression(&p, &TypeEnv::new(), &ty(&p, "eth"), &parse_expr("eth.etherType").unwrap());
    assert_eq!((t, ds.len()), (Some(BaseType::Bits(16)), 0));
    let (_, ds) = check_expression(&p, &TypeEnv::new(), &ty(&p, "eth.(tcp + 1)"), &parse_expr("tcp.syn").unwrap());
    assert_eq!(ds[0].kind, DiagnosticKind::InvalidHeader);
    let env: TypeEnv = [("x".to_string(), BaseType::Bits(48))].into_iter().collect();
    let (t, _) = check_expression(&p, &env, &ty(&p, "1"), &parse_expr("x").unwrap());
    assert_eq!(t, Some(BaseType::Bits(48)));
}

#[test]
fn expression_type_mismatch() {
    let p = program();
    let (t, ds) = check_expression(&p, &TypeEnv::new(), &ty(&p, "eth"), &parse_expr("eth.etherType == 1:8").unwrap());
    assert_eq!(t, None);
    assert_eq!(ds[0].kind, DiagnosticKind::TypeMismatch);
}

#[test]
fn action_typing() {
    let p = program();
    let (params, out, ds) = check_action(&p, &TypeEnv::new(), &ty(&p, "eth.ipv4"), p.action("next_hop").unwrap());
    assert_eq!(params, [BaseType::Bits(48), BaseType::Bits(48)]);
    assert!(ds.is_empty());
    assert!(out.equiv(&ty(&p, "eth.ipv4")).unwrap());

    let (params, out, ds) = check_action(&p, &TypeEnv::new(), &ty(&p, "eth.vlan"), p.action("remove_vlan").unwrap());
    assert!(params.is_empty() && ds.is_empty());
    assert_eq!(denote(&out).unwrap(), [set(&p, &["eth"])].into());

    let (_, out, _) = check_action(&p, &TypeEnv::new(), &ty(&p, "eth"), p.action("nop").unwrap());
    assert_eq!(out, ty(&p, "eth"));
}

#[test]
fn maskable_definition() {
    let p = program();
    let t = p.table("pvm_ternary").unwrap();
    assert!(t.reads.iter().all(|r| maskable(t, r)));
    let t = p.table("pvm_exact").unwrap();
    assert!(t.reads.iter().all(|r| !maskable(t, r)));
    let src = "header h { f: 8 } instance a: h instance b: h table t { reads { a: valid; b.f: ternary } actions { } }";
    let q = parse_program(src).unwrap();
    let t = q.table("t").unwrap();
    assert!(!maskable(t, &t.reads[0]));
}

#[test]
fn control_validity_inference() {
    let p = program();
    let theta = ty(&p, "eth.(ipv4 + vlan + 1)");
    let (a, ws) = infer_control_validity(&p, &theta, p.table("fwd").unwrap());
    assert!(a.for_action("next_hop").is_empty());
    assert_eq!(a.for_action("remove_vlan"), ["vlan".to_string()].into());
    assert_eq!(ws.len(), 1);
    assert_eq!(ws[0].message, "assuming vlan matched as valid for rules with action remove_vlan");

    let (a, ws) = infer_control_validity(&p, &theta, p.table("plain").unwrap());
    assert!(a.for_action("next_hop").is_empty() && ws.is_empty());
}

#[test]
fn implicit_default_keeps_input_type() {
    let p = program();
    let theta = ty(&p, "eth.ipv4");
    let r = check_table_apply(&p, &theta, p.table("add_value_header_1").unwrap(), &CheckOptions::default());
    let expected = ty(&p, "eth.ipv4 + eth.ipv4.nc_value_1");
    assert!(r.output_type.equiv(&expected).unwrap());
    let r = check_table_apply(&p, &theta, p.table("add_value_header_1_fixed").unwrap(), &CheckOptions::default());
    assert!(r.output_type.equiv(&ty(&p, "eth.ipv4.nc_value_1")).unwrap());
}

#[test]
fn reads_match_kinds() {
    let p = program();
    let theta = ty(&p, "eth.(vlan0.(vlan1 + 1) + 1)");
    let r = check_table_apply(&p, &theta, p.table("pvm_exact").unwrap(), &CheckOptions::default());
    assert_eq!(r.error_count(), 2);
    let r = check_table_apply(&p, &theta, p.table("pvm_ternary").unwrap(), &CheckOptions::default());
    assert_eq!(r.error_count(), 0);
    let ws: Vec<_> = r.warnings().map(|d| d.message.clone()).collect();
    assert_eq!(
        ws,
        [
            "assuming either vlan0 matched as valid or vlan0.vid wildcarded",
            "assuming either vlan1 matched as valid or vlan1.vid wildcarded"
        ]
    );
}

#[test]
fn skip_program() {
    let p = parse_program("control { }").unwrap();
    let r = check_program(&p);
    assert!(r.output_type.is_one());
    assert!(r.diagnostics.is_empty());
    assert_eq!(r.point_types.len(), 1);
    assert!(r.point_types[0].ty.is_one());
}

#[test]
fn errors_are_recovered_and_repeated() {
    let p = program();
    let r = check(&p, "eth.(tcp + 1)", "tcp.syn = tcp.syn; tcp.syn = 0:1");
    assert_eq!(r.error_count(), 3);
}

#[test]
fn check_is_deterministic() {
    let p = program();
    let a = check(&p, "eth.(vlan + ipv4 + 1)", "apply(fwd); ipv4.ttl = 1:8; apply(pvm_exact)");
    let b = check(&p, "eth.(vlan + ipv4 + 1)", "apply(fwd); ipv4.ttl = 1:8; apply(pvm_exact)");
    assert_eq!(a.diagnostics, b.diagnostics);
}
