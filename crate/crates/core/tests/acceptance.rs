//! Acceptance criteria. Runs without the test harness and prints one PASS/FAIL
//! line per criterion; exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use hvc::algebra::{entails, from_denotation, parse_notation, HeaderType};
use hvc::check::{check_command, check_program, check_table_apply, CheckOptions, PointKind, TypeEnv};
use hvc::control::{load_entries, select_action, validate_well_behaved, TableState};
use hvc::diagnostics::BugCategory;
use hvc::gen;
use hvc::interp::{deserialize, run, serialize, BitStream, Fault, FieldRecord, HeaderMap};
use hvc::syntax::InstId;

const SEED: u64 = 0x5eed_2026;
// Every randomized suite requires zero mismatches; only the time budgets have slack.

const OPERATOR_TERMS: usize = 10_000;
const OPERATOR_DEPTH: u32 = 6;
const UNIVERSE: u16 = 5;
const OPERATOR_TIME: Duration = Duration::from_secs(30);

const ENTAILMENT_PAIRS: usize = 10_000;
const MONOTONICITY_CASES: usize = 1_000;

const SOUNDNESS_PROGRAMS: usize = 500;
const PACKETS_PER_PROGRAM: usize = 20;
const MAX_PACKET_BITS: usize = 256;
const SOUNDNESS_TIME: Duration = Duration::from_secs(60);

const ROUND_TRIPS: usize = 1_000;
const MAX_TABLE_INSTANCES: usize = 4;
const STATES_PER_TABLE: usize = 50;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn operator_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut checks = 0usize;
    for _ in 0..OPERATOR_TERMS {
        let t = gen::header_type(&mut rng, UNIVERSE, OPERATOR_DEPTH);
        let d = model(&t);
        checks += 1;
        if t.is_empty() != d.is_empty() {
            mismatches.push(format!("is_empty {t:?}"));
        }
        for h in 0..UNIVERSE {
            let id = InstId(h);
            checks += 4;
            if model(&t.restrict(id)) != model_restrict(&d, h) {
                mismatches.push(format!("restrict {h} {t:?}"));
            }
            if model(&t.neg_restrict(id)) != model_neg_restrict(&d, h) {
                mismatches.push(format!("neg_restrict {h} {t:?}"));
            }
            if model(&t.remove(id)) != model_remove(&d, h) {
                mismatches.push(format!("remove {h} {t:?}"));
            }
            if t.includes(id) != model_includes(&d, h) {
                mismatches.push(format!("includes {h} {t:?}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches.is_empty() && elapsed < OPERATOR_TIME;
    let mut detail = format!("{checks} checks, {} mismatches, {:.1}s", mismatches.len(), elapsed.as_secs_f64());
    if let Some(m) = mismatches.first() {
        detail.push_str(&format!("; first: {m}"));
    }
    outcome(pass, detail)
}

fn entailment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut mismatches = 0;
    let mut members = 0;
    for _ in 0..ENTAILMENT_PAIRS {
        let t = gen::header_type(&mut rng, UNIVERSE, OPERATOR_DEPTH);
        let d = model(&t);
        // Half the time pick a known alternative so both outcomes are exercised.
        let s: Alt = match d.iter().nth(rng.gen_range(0..d.len().max(1))) {
            Some(a) if rng.gen_bool(0.5) => a.clone(),
            _ => (0..UNIVERSE).filter(|_| rng.gen_bool(0.4)).collect(),
        };
        let expected = d.contains(&s);
        members += expected as usize;
        if entails(&inst_set(&s), &t) != expected {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("{ENTAILMENT_PAIRS} pairs ({members} members), {mismatches} mismatches"),
    )
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut violations = 0;
    let mut cases = 0;
    let mut well_typed = 0;
    while cases < MONOTONICITY_CASES {
        let p = gen::program(&mut rng, 0.1);
        let n = p.instances.len() as u16;
        let theta = gen::header_type(&mut rng, n, 4);
        let d = model(&theta);
        let sub: Sets = d.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
        let theta_sub = from_denotation(&sub.iter().map(inst_set).collect());
        if !model(&theta_sub).is_subset(&d) {
            violations += 1;
        }
        cases += 1;

        let env = TypeEnv::new();
        let big = check_command(&p, &env, &theta, &p.body, &CheckOptions::default());
        let fixed = CheckOptions {
            fixed_assumptions: Some(big.assumptions.clone()),
            ..CheckOptions::default()
        };
        let big = check_command(&p, &env, &theta, &p.body, &fixed);
        let small = check_command(&p, &env, &theta_sub, &p.body, &fixed);
        if big.is_ok() {
            well_typed += 1;
            if !small.is_ok() {
                violations += 1;
            }
        }
        if !model(&small.output_type).is_subset(&model(&big.output_type)) {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{cases} cases ({well_typed} well-typed), {violations} violations"),
    )
}

fn entry_point(f: &Fixture, needle: &str) -> Option<HeaderType> {
    let at = offset_of(&f.src, needle);
    f.result
        .point_types
        .iter()
        .find(|pt| pt.kind == PointKind::Entry && pt.span.start == at)
        .map(|pt| pt.ty.clone())
}

fn type_goldens() -> Outcome {
    let mut failures = Vec::new();

    let parser = fixture("p4_parser.sp4");
    let want = names(&[&["ethernet"], &["ethernet", "vlan"], &["ethernet", "ipv4"], &["ethernet", "vlan", "ipv4"]]);
    match entry_point(&parser, "apply(forward)") {
        Some(t) if named(&parser.program, &model(&t)) == want => {}
        other => failures.push(format!("parser ingress type {other:?}")),
    }

    let nethcf = fixture("nethcf_fixed.sp4");
    match entry_point(&nethcf, "add(meta)") {
        Some(t) if named(&nethcf.program, &model(&t)) == names(&[&["ethernet", "ipv4", "tcp"]]) => {}
        other => failures.push(format!("nethcf ingress type {other:?}")),
    }

    for (file, defaulted) in [("netcache_default_unsafe.sp4", false), ("netcache_default_fixed.sp4", true)] {
        let f = fixture(file);
        let p = &f.program;
        let lookup = |n: &str| p.inst_id(n);
        let theta = parse_notation("ethernet.nc_hdr.meta + ethernet.meta", &lookup).expect("notation");
        let expected = if defaulted {
            parse_notation("(ethernet.nc_hdr.meta + ethernet.meta).nc_value_1", &lookup)
        } else {
            parse_notation(
                "(ethernet.nc_hdr.meta + ethernet.meta) + (ethernet.nc_hdr.meta + ethernet.meta).nc_value_1",
                &lookup,
            )
        }
        .expect("notation");
        let t = p.table("add_value_header_1").expect("table");
        let out = check_table_apply(p, &theta, t, &CheckOptions::default());
        if model(&out.output_type) != model(&expected) {
            failures.push(format!("{file}: apply output {}", out.output_type.display(p)));
        }
    }
    outcome(failures.is_empty(), if failures.is_empty() { "4 goldens match".into() } else { failures.join("; ") })
}

fn bug_taxonomy() -> Outcome {
    let mut failures = Vec::new();
    let pairs = [
        ("nethcf", BugCategory::ParserBug),
        ("netcache_control", BugCategory::ControlBug),
        ("port_vlan_mapping", BugCategory::TableReadsBug),
        ("fabric", BugCategory::TableActionBug),
        ("netcache_default", BugCategory::DefaultActionBug),
    ];
    for (name, cat) in pairs {
        let bad = fixture(&format!("{name}_unsafe.sp4"));
        if !bad.result.errors().any(|d| d.category == Some(cat)) {
            failures.push(format!("{name}_unsafe has no {cat} error"));
        }
        let good = fixture(&format!("{name}_fixed.sp4"));
        if good.result.error_count() != 0 {
            failures.push(format!("{name}_fixed has {} errors", good.result.error_count()));
        }
    }
    for name in ["port_vlan_mapping_fixed.sp4", "fabric_fixed.sp4"] {
        if !fixture(name).result.warnings().any(|w| w.message.contains("matched as valid")) {
            failures.push(format!("{name} has no \"matched as valid\" warning"));
        }
    }
    let counts: Vec<usize> = ["nethcf_unsafe.sp4", "nethcf_eth_fixed.sp4", "nethcf_fixed.sp4"]
        .iter()
        .map(|f| fixture(f).result.error_count())
        .collect();
    if counts != [11, 5, 0] {
        failures.push(format!("nethcf error lines {counts:?}, expected [11, 5, 0]"));
    }
    let detail = if failures.is_empty() {
        format!("5 categories, nethcf error lines {counts:?}")
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let start = Instant::now();
    let (mut accepted, mut generated, mut runs) = (0, 0, 0);
    let mut failures = Vec::new();
    while accepted < SOUNDNESS_PROGRAMS {
        let p = gen::program(&mut rng, 0.1);
        generated += 1;
        let r = check_program(&p);
        if !r.is_ok() {
            continue;
        }
        accepted += 1;
        let out = model(&r.output_type);
        for _ in 0..PACKETS_PER_PROGRAM {
            let st = gen::table_state(&mut rng, &p, &r.assumptions);
            if !validate_well_behaved(&p, &st, &r.assumptions).is_empty() {
                failures.push("generated entries fail validation".to_string());
                continue;
            }
            let res = run(&p, gen::packet(&mut rng, MAX_PACKET_BITS), &st);
            runs += 1;
            match &res.fault {
                Some(f @ Fault::InvalidAccess { .. }) => failures.push(format!("{f}")),
                Some(f) => failures.push(format!("stuck: {f}")),
                None if !res.completed() => failures.push("did not reach skip".into()),
                None if !out.contains(&alt(&res.config.headers.dom())) => {
                    failures.push(format!("final dom {:?} outside the output type", res.config.headers.dom_names(&p)))
                }
                None => {}
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed < SOUNDNESS_TIME;
    let mut detail = format!(
        "{accepted} programs ({generated} generated), {runs} runs, {} failures, {:.1}s",
        failures.len(),
        elapsed.as_secs_f64()
    );
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first: {f}"));
    }
    outcome(pass, detail)
}

fn serialization_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut mismatches = 0;
    for _ in 0..ROUND_TRIPS {
        let eta = gen::header_type_decl(&mut rng);
        let total = eta.total_width();
        let len = rng.gen_range(0..=2 * total);
        let bits: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
        let mut input = BitStream::from_bits(bits.iter().copied().collect());
        let rec = deserialize(&eta, &mut input);
        let out: Vec<bool> = serialize(&eta, &rec).iter().map(|b| *b).collect();
        let mut expected: Vec<bool> = bits.iter().copied().take(total).collect();
        expected.resize(total, false);
        let rest: Vec<bool> = input.remaining().iter().map(|b| *b).collect();
        if out != expected || rest != bits[total.min(len)..] {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{ROUND_TRIPS} pairs, {mismatches} mismatches"))
}

fn well_behavedness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut tables = 0;
    let mut states = 0;
    let mut maps = 0;
    let mut faults = Vec::new();
    let entry_files: BTreeMap<&str, &str> = [
        ("p4_parser.sp4", "forward.entries"),
        ("port_vlan_mapping_fixed.sp4", "port_vlan_mapping.entries"),
        ("fabric_fixed.sp4", "fabric.entries"),
    ]
    .into();
    for file in corpus_programs() {
        let f = fixture(&file);
        let p = &f.program;
        let mut candidates: Vec<TableState> = Vec::new();
        if let Some(e) = entry_files.get(file.as_str()) {
            match load_entries(&corpus_text(e), p) {
                Ok(st) => candidates.push(st),
                Err(ds) => faults.push(format!("{e}: {}", ds[0].message)),
            }
        }
        for (name, t) in &p.tables {
            let referenced = t.referenced_instances();
            if referenced.len() > MAX_TABLE_INSTANCES {
                continue;
            }
            tables += 1;
            let mut local = candidates.clone();
            for _ in 0..STATES_PER_TABLE {
                let mut st = TableState::default();
                st.tables.insert(name.clone(), raw_entries(&mut rng, p, name));
                local.push(st);
            }
            local.push(gen::table_state(&mut rng, p, &f.result.assumptions));
            // Headers of keys that cannot be wildcarded are checked statically.
            let required: Vec<String> = t
                .reads
                .iter()
                .filter(|r| !hvc::check::maskable(t, r))
                .flat_map(|r| r.expr.referenced_headers())
                .collect();
            let referenced: Vec<&String> = referenced.iter().collect();
            for st in local {
                if !validate_well_behaved(p, &st, &f.result.assumptions).is_empty() {
                    continue;
                }
                states += 1;
                for mask in 0u32..1 << referenced.len() {
                    let dom: Vec<&str> = referenced
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & 1 << i != 0)
                        .map(|(_, h)| h.as_str())
                        .collect();
                    if required.iter().any(|h| !dom.contains(&h.as_str())) {
                        continue;
                    }
                    let mut h = HeaderMap::default();
                    for name in &dom {
                        let ht = p.header_type_of(name).expect("instance type");
                        let values = ht.fields.iter().map(|fd| gen::value(&mut rng, hvc::syntax::BaseType::Bits(fd.width))).collect();
                        h.0.insert(p.inst_id(name).expect("instance"), FieldRecord { values });
                    }
                    maps += 1;
                    if let Err(e) = select_action(p, t, &h, &st) {
                        faults.push(format!("{file} table {name}, valid {dom:?}: {e}"));
                    }
                }
            }
        }
    }
    let mut detail = format!("{tables} tables, {states} validated states, {maps} header maps, {} faults", faults.len());
    if let Some(f) = faults.first() {
        detail.push_str(&format!("; first: {f}"));
    }
    outcome(faults.is_empty() && states > 0, detail)
}

fn main() -> ExitCode {
    // Keep the harness-style flags from breaking the run.
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [Criterion; 8] = [
        ("1 operator equivalence", operator_equivalence),
        ("2 entailment", entailment),
        ("3 monotonicity", monotonicity),
        ("4 type goldens", type_goldens),
        ("5 bug taxonomy corpus", bug_taxonomy),
        ("6 soundness fuzz", soundness),
        ("7 serialization round trip", serialization_round_trip),
        ("8 well-behavedness enforcement", well_behavedness),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|w| name.contains(w.as_str())) {
            continue;
        }
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {status} ({})", o.detail);
        failed += !o.pass as usize;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
