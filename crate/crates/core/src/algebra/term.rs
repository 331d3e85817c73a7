use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::syntax::InstId;

/// A header-validity type Θ. Terms are immutable and share subterms.
#[derive(Clone)]
pub struct HeaderType(Arc<Node>);

struct Node {
    kind: Kind,
    size: usize,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    Zero,
    One,
    Inst(InstId),
    Concat(HeaderType, HeaderType),
    Choice(HeaderType, HeaderType),
}

impl PartialEq for HeaderType {
    /// Syntactic equality. Use [`HeaderType::equiv`] for semantic equality.
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.size == other.0.size && self.0.kind == other.0.kind)
    }
}

impl Eq for HeaderType {}

impl Hash for HeaderType {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.kind.hash(state)
    }
}

impl fmt::Debug for HeaderType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Zero => f.write_str("0"),
            Kind::One => f.write_str("1"),
            Kind::Inst(h) => write!(f, "#{}", h.0),
            Kind::Concat(a, b) => write!(f, "({a:?}.{b:?})"),
            Kind::Choice(a, b) => write!(f, "({a:?}+{b:?})"),
        }
    }
}

impl HeaderType {
    fn mk(kind: Kind) -> Self {
        let size = match &kind {
            Kind::Zero | Kind::One | Kind::Inst(_) => 1,
            Kind::Concat(a, b) | Kind::Choice(a, b) => a.size().saturating_add(b.size()).saturating_add(1),
        };
        HeaderType(Arc::new(Node { kind, size }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Number of nodes in the term, counting shared subterms once per occurrence.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn zero() -> Self {
        HeaderType::mk(Kind::Zero)
    }

    pub fn one() -> Self {
        HeaderType::mk(Kind::One)
    }

    pub fn inst(h: InstId) -> Self {
        HeaderType::mk(Kind::Inst(h))
    }

    /// `Θ₁·Θ₂` exactly as written.
    pub fn concat_raw(a: HeaderType, b: HeaderType) -> Self {
        HeaderType::mk(Kind::Concat(a, b))
    }

    /// `Θ₁+Θ₂` exactly as written.
    pub fn choice_raw(a: HeaderType, b: HeaderType) -> Self {
        HeaderType::mk(Kind::Choice(a, b))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind(), Kind::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(self.kind(), Kind::One)
    }

    /// Simplifying concatenation over normalized operands.
    pub fn concat(a: HeaderType, b: HeaderType) -> Self {
        match (a.kind(), b.kind()) {
            (Kind::Zero, _) | (_, Kind::Zero) => HeaderType::zero(),
            (Kind::One, _) => b,
            (_, Kind::One) => a,
            (Kind::Concat(x, y), _) => HeaderType::concat(x.clone(), HeaderType::concat(y.clone(), b)),
            _ => HeaderType::concat_raw(a, b),
        }
    }

    /// Simplifying choice over normalized operands.
    pub fn choice(a: HeaderType, b: HeaderType) -> Self {
        match (a.kind(), b.kind()) {
            (Kind::Zero, _) => b,
            (_, Kind::Zero) => a,
            (Kind::Choice(x, y), _) => HeaderType::choice(x.clone(), HeaderType::choice(y.clone(), b)),
            _ => {
                if b.choice_spine().any(|t| *t == a) {
                    b
                } else {
                    HeaderType::choice_raw(a, b)
                }
            }
        }
    }

    fn choice_spine(&self) -> impl Iterator<Item = &HeaderType> {
        let mut cur = Some(self);
        std::iter::from_fn(move || {
            let t = cur?;
            match t.kind() {
                Kind::Choice(a, b) => {
                    cur = Some(b);
                    Some(a)
                }
                _ => {
                    cur = None;
                    Some(t)
                }
            }
        })
    }

    pub fn product<I: IntoIterator<Item = HeaderType>>(items: I) -> Self {
        let items: Vec<_> = items.into_iter().collect();
        items.into_iter().rev().fold(HeaderType::one(), |acc, t| HeaderType::concat(t, acc))
    }

    pub fn sum<I: IntoIterator<Item = HeaderType>>(items: I) -> Self {
        let items: Vec<_> = items.into_iter().collect();
        items.into_iter().rev().fold(HeaderType::zero(), |acc, t| HeaderType::choice(t, acc))
    }

    /// Rebuild with the simplifying constructors. Preserves the denotation.
    pub fn normalize(&self) -> HeaderType {
        match self.kind() {
            Kind::Zero | Kind::One | Kind::Inst(_) => self.clone(),
            Kind::Concat(a, b) => HeaderType::concat(a.normalize(), b.normalize()),
            Kind::Choice(a, b) => HeaderType::choice(a.normalize(), b.normalize()),
        }
    }

    /// Keeps the alternatives in which `h` is valid.
    pub fn restrict(&self, h: InstId) -> HeaderType {
        match self.kind() {
            Kind::Zero | Kind::One => HeaderType::zero(),
            Kind::Inst(g) => {
                if *g == h {
                    self.clone()
                } else {
                    HeaderType::zero()
                }
            }
            Kind::Concat(a, b) => HeaderType::choice(
                HeaderType::concat(a.restrict(h), b.clone()),
                HeaderType::concat(a.clone(), b.restrict(h)),
            ),
            Kind::Choice(a, b) => HeaderType::choice(a.restrict(h), b.restrict(h)),
        }
    }

    /// Keeps the alternatives in which `h` is invalid.
    pub fn neg_restrict(&self, h: InstId) -> HeaderType {
        match self.kind() {
            Kind::Zero | Kind::One => self.clone(),
            Kind::Inst(g) => {
                if *g == h {
                    HeaderType::zero()
                } else {
                    self.clone()
                }
            }
            Kind::Concat(a, b) => HeaderType::concat(a.neg_restrict(h), b.neg_restrict(h)),
            Kind::Choice(a, b) => HeaderType::choice(a.neg_restrict(h), b.neg_restrict(h)),
        }
    }

    /// Deletes `h` from every alternative.
    pub fn remove(&self, h: InstId) -> HeaderType {
        match self.kind() {
            Kind::Zero | Kind::One => self.clone(),
            Kind::Inst(g) => {
                if *g == h {
                    HeaderType::one()
                } else {
                    self.clone()
                }
            }
            Kind::Concat(a, b) => HeaderType::concat(a.remove(h), b.remove(h)),
            Kind::Choice(a, b) => HeaderType::choice(a.remove(h), b.remove(h)),
        }
    }

    pub fn restrict_all<'a>(&self, hs: impl IntoIterator<Item = &'a InstId>) -> HeaderType {
        hs.into_iter().fold(self.clone(), |t, h| t.restrict(*h))
    }

    /// Whether the denotation is empty.
    pub fn is_empty(&self) -> bool {
        match self.kind() {
            Kind::Zero => true,
            Kind::One | Kind::Inst(_) => false,
            Kind::Concat(a, b) => a.is_empty() || b.is_empty(),
            Kind::Choice(a, b) => a.is_empty() && b.is_empty(),
        }
    }

    /// Whether `h` is valid in every alternative, with at least one alternative.
    pub fn includes(&self, h: InstId) -> bool {
        self.empty_includes(h).1
    }

    /// (is_empty, includes) computed together; `includes` is false on empty terms.
    fn empty_includes(&self, h: InstId) -> (bool, bool) {
        match self.kind() {
            Kind::Zero => (true, false),
            Kind::One => (false, false),
            Kind::Inst(g) => (false, *g == h),
            Kind::Concat(a, b) => {
                let (e1, i1) = a.empty_includes(h);
                let (e2, i2) = b.empty_includes(h);
                if e1 || e2 {
                    (true, false)
                } else {
                    (false, i1 || i2)
                }
            }
            Kind::Choice(a, b) => {
                let (e1, i1) = a.empty_includes(h);
                let (e2, i2) = b.empty_includes(h);
                match (e1, e2) {
                    (true, true) => (true, false),
                    (true, false) => (false, i2),
                    (false, true) => (false, i1),
                    (false, false) => (false, i1 && i2),
                }
            }
        }
    }

    /// Instances mentioned anywhere in the term.
    pub fn instances(&self) -> BTreeSet<InstId> {
        let mut out = BTreeSet::new();
        self.collect_instances(&mut out);
        out
    }

    fn collect_instances(&self, out: &mut BTreeSet<InstId>) {
        match self.kind() {
            Kind::Zero | Kind::One => {}
            Kind::Inst(h) => {
                out.insert(*h);
            }
            Kind::Concat(a, b) | Kind::Choice(a, b) => {
                a.collect_instances(out);
                b.collect_instances(out);
            }
        }
    }
}
