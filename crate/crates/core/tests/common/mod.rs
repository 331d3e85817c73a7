//! Shared test helpers: a brute-force set-of-sets model of header types and
//! corpus loading.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::Rng;

use hvc::algebra::{HeaderType, InstSet, Kind};
use hvc::control::{Entry, KeyPattern, TableEntries};
use hvc::gen;
use hvc::check::{check_program, CheckResult};
use hvc::syntax::{parse_program, InstId, MatchKind, Program, SourceFile, Value};

pub type Alt = BTreeSet<u16>;
pub type Sets = BTreeSet<Alt>;

/// Denotation computed directly from the definition, with plain sets.
pub fn model(t: &HeaderType) -> Sets {
    match t.kind() {
        Kind::Zero => Sets::new(),
        Kind::One => [Alt::new()].into(),
        Kind::Inst(h) => [[h.0].into()].into(),
        Kind::Concat(a, b) => {
            let (a, b) = (model(a), model(b));
            let mut out = Sets::new();
            for x in &a {
                for y in &b {
                    out.insert(x.union(y).copied().collect());
                }
            }
            out
        }
        Kind::Choice(a, b) => model(a).union(&model(b)).cloned().collect(),
    }
}

pub fn model_restrict(s: &Sets, h: u16) -> Sets {
    s.iter().filter(|a| a.contains(&h)).cloned().collect()
}

pub fn model_neg_restrict(s: &Sets, h: u16) -> Sets {
    s.iter().filter(|a| !a.contains(&h)).cloned().collect()
}

pub fn model_remove(s: &Sets, h: u16) -> Sets {
    s.iter()
        .map(|a| {
            let mut a = a.clone();
            a.remove(&h);
            a
        })
        .collect()
}

pub fn model_includes(s: &Sets, h: u16) -> bool {
    !s.is_empty() && s.iter().all(|a| a.contains(&h))
}

pub fn alt(s: &InstSet) -> Alt {
    s.iter().map(|h| h.0).collect()
}

pub fn inst_set(a: &Alt) -> InstSet {
    a.iter().map(|h| InstId(*h)).collect()
}

/// Alternatives spelled with instance names.
pub fn named(p: &Program, s: &Sets) -> BTreeSet<BTreeSet<String>> {
    s.iter()
        .map(|a| a.iter().map(|h| p.inst_name(InstId(*h)).to_string()).collect())
        .collect()
}

pub fn names(groups: &[&[&str]]) -> BTreeSet<BTreeSet<String>> {
    groups.iter().map(|g| g.iter().map(|s| s.to_string()).collect()).collect()
}

pub fn corpus_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file)
}

pub fn corpus_text(file: &str) -> String {
    std::fs::read_to_string(corpus_path(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

pub struct Fixture {
    pub src: SourceFile,
    pub program: Program,
    pub result: CheckResult,
}

pub fn fixture(file: &str) -> Fixture {
    let src = SourceFile::new(file, corpus_text(file));
    let program = parse_program(&src.text).unwrap_or_else(|e| panic!("{file}: {e:?}"));
    let result = check_program(&program);
    Fixture { src, program, result }
}

/// Every `.sp4` file in the corpus.
pub fn corpus_programs() -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(corpus_path(""))
        .expect("corpus directory")
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".sp4"))
        .collect();
    v.sort();
    v
}

/// Byte offset of the first occurrence of `needle`, for locating program points.
pub fn offset_of(src: &SourceFile, needle: &str) -> usize {
    src.text.find(needle).unwrap_or_else(|| panic!("`{needle}` not in {}", src.name))
}

/// Arbitrary entries for `t`, not necessarily well behaved.
pub fn raw_entries<R: Rng>(rng: &mut R, p: &Program, table: &str) -> TableEntries {
    let t = &p.tables[table];
    let mut te = TableEntries::default();
    for _ in 0..rng.gen_range(1..=4) {
        let action = t.actions[rng.gen_range(0..t.actions.len())].name.clone();
        let keys = t
            .reads
            .iter()
            .map(|r| {
                let ty = hvc::check::expr_type(p, &r.expr).expect("typed key");
                let v = gen::value(rng, ty);
                match (r.kind, v, rng.gen_range(0..3)) {
                    (MatchKind::Ternary, _, 0) => KeyPattern::Wildcard,
                    (MatchKind::Ternary, Value::Bits { value, width }, _) => KeyPattern::Ternary {
                        value,
                        mask: rng.gen::<u128>() & hvc::syntax::mask(width),
                    },
                    (_, v, _) => KeyPattern::Exact(v),
                }
            })
            .collect();
        te.entries.push(Entry {
            valid_bits: t.valids.iter().map(|_| rng.gen()).collect(),
            keys,
            data: p.actions[&action].params.iter().map(|prm| gen::value(rng, prm.ty)).collect(),
            action,
            span: Default::default(),
        });
    }
    te
}
