use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::InstId;

use super::term::{HeaderType, Kind};

pub const DEFAULT_MAX_DENOTATION: usize = 1 << 16;

/// A set of instances as a bitset. Trailing zero words are trimmed so that
/// derived equality and ordering are canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstSet(Vec<u64>);

impl InstSet {
    pub fn new() -> Self {
        InstSet(Vec::new())
    }

    pub fn singleton(h: InstId) -> Self {
        let mut s = InstSet::new();
        s.insert(h);
        s
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    pub fn insert(&mut self, h: InstId) {
        let (w, b) = (h.index() / 64, h.index() % 64);
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << b;
    }

    pub fn remove(&mut self, h: InstId) {
        let (w, b) = (h.index() / 64, h.index() % 64);
        if w < self.0.len() {
            self.0[w] &= !(1 << b);
            self.trim();
        }
    }

    pub fn without(&self, h: InstId) -> InstSet {
        let mut s = self.clone();
        s.remove(h);
        s
    }

    pub fn contains(&self, h: InstId) -> bool {
        let (w, b) = (h.index() / 64, h.index() % 64);
        self.0.get(w).is_some_and(|x| x & (1 << b) != 0)
    }

    pub fn union(&self, other: &InstSet) -> InstSet {
        let (long, short) = if self.0.len() >= other.0.len() { (self, other) } else { (other, self) };
        let mut v = long.0.clone();
        for (x, y) in v.iter_mut().zip(&short.0) {
            *x |= y;
        }
        InstSet(v)
    }

    pub fn is_subset(&self, other: &InstSet) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = InstId> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |b| w & (1u64 << b) != 0).map(move |b| InstId((wi * 64 + b) as u16))
        })
    }
}

impl FromIterator<InstId> for InstSet {
    fn from_iter<T: IntoIterator<Item = InstId>>(iter: T) -> Self {
        let mut s = InstSet::new();
        for h in iter {
            s.insert(h);
        }
        s
    }
}

/// `⟦Θ⟧`: the set of alternatives, each a set of co-valid instances.
pub type Denotation = BTreeSet<InstSet>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("header type denotes more than {cap} alternatives")]
pub struct CapExceeded {
    pub cap: usize,
}

pub fn denote(t: &HeaderType) -> Result<Denotation, CapExceeded> {
    denote_capped(t, DEFAULT_MAX_DENOTATION)
}

pub fn denote_capped(t: &HeaderType, cap: usize) -> Result<Denotation, CapExceeded> {
    denote_filtered(t, cap, &|_| true)
}

/// The alternatives of `t` that are subsets of `within`.
pub fn denote_within(t: &HeaderType, within: &InstSet) -> Denotation {
    // Bounded by the powerset of `within`, so the cap cannot trigger for small sets.
    denote_filtered(t, usize::MAX, &|s: &InstSet| s.is_subset(within)).unwrap_or_default()
}

fn denote_filtered(t: &HeaderType, cap: usize, keep: &dyn Fn(&InstSet) -> bool) -> Result<Denotation, CapExceeded> {
    let out = match t.kind() {
        Kind::Zero => Denotation::new(),
        Kind::One => [InstSet::new()].into(),
        Kind::Inst(h) => {
            let s = InstSet::singleton(*h);
            if keep(&s) {
                [s].into()
            } else {
                Denotation::new()
            }
        }
        Kind::Concat(a, b) => {
            let da = denote_filtered(a, cap, keep)?;
            if da.is_empty() {
                return Ok(Denotation::new());
            }
            let db = denote_filtered(b, cap, keep)?;
            let mut out = Denotation::new();
            for x in &da {
                for y in &db {
                    let u = x.union(y);
                    if keep(&u) {
                        out.insert(u);
                        if out.len() > cap {
                            return Err(CapExceeded { cap });
                        }
                    }
                }
            }
            out
        }
        Kind::Choice(a, b) => {
            let mut da = denote_filtered(a, cap, keep)?;
            da.extend(denote_filtered(b, cap, keep)?);
            da
        }
    };
    if out.len() > cap {
        return Err(CapExceeded { cap });
    }
    Ok(out)
}

/// `S ⊨ Θ`: whether `s` is one of the alternatives of `t`.
pub fn entails(s: &InstSet, t: &HeaderType) -> bool {
    denote_within(t, s).contains(s)
}

/// `Θ₁ < Θ₂`: denotation inclusion.
pub fn subtype(a: &HeaderType, b: &HeaderType) -> Result<bool, CapExceeded> {
    let da = denote(a)?;
    Ok(da.iter().all(|s| entails(s, b)))
}

/// Semantic equality.
pub fn equiv(a: &HeaderType, b: &HeaderType) -> Result<bool, CapExceeded> {
    Ok(denote(a)? == denote(b)?)
}

/// Sum of products listing each alternative.
pub fn from_denotation(d: &Denotation) -> HeaderType {
    HeaderType::sum(d.iter().map(|s| HeaderType::product(s.iter().map(HeaderType::inst))))
}

impl HeaderType {
    pub fn equiv(&self, other: &HeaderType) -> Result<bool, CapExceeded> {
        equiv(self, other)
    }

    pub fn subtype_of(&self, other: &HeaderType) -> Result<bool, CapExceeded> {
        subtype(self, other)
    }
}
