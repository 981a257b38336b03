use std::fmt;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of one of the supported monoids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    Nat(u64),
    /// The single element of the trivial monoid.
    Unit,
    Word(Vec<Element>),
    /// Element of a finite monoid given by its table.
    Fin(usize),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Nat(n) => write!(f, "{n}"),
            Element::Unit => write!(f, "*"),
            Element::Fin(i) => write!(f, "m{i}"),
            Element::Word(w) => {
                write!(f, "(")?;
                for (i, e) in w.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite monoid presented by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteMonoid {
    pub table: Vec<Vec<usize>>,
    pub unit: usize,
}

impl FiniteMonoid {
    pub fn new(table: Vec<Vec<usize>>, unit: usize) -> Result<Self> {
        let n = table.len();
        let bad = |m: &str| Err(Error::validation("finite monoid", m));
        if n == 0 || unit >= n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return bad("table must be square with entries in range");
        }
        for a in 0..n {
            if table[unit][a] != a || table[a][unit] != a {
                return bad("unit is not neutral");
            }
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("operation is not associative");
                    }
                }
            }
        }
        Ok(FiniteMonoid { table, unit })
    }

    /// ℤ/n under addition.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteMonoid { table, unit: 0 }
    }

    /// {0,…,cap} under addition truncated at `cap`.
    pub fn threshold(cap: usize) -> Self {
        let table = (0..=cap).map(|a| (0..=cap).map(|b| (a + b).min(cap)).collect()).collect();
        FiniteMonoid { table, unit: 0 }
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonoidKind {
    /// (ℕ, +, 0).
    NatAdd,
    /// The one-element monoid 1.
    Trivial,
    /// Words over a finite letter set, under concatenation.
    FreeWords { letters: Vec<Element> },
    Finite(FiniteMonoid),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidSpec {
    pub kind: MonoidKind,
    /// Largest natural number, word length or word sum that may be handled.
    pub enumeration_bound: u64,
}

fn size_of(e: &Element) -> u64 {
    match e {
        Element::Nat(n) => *n,
        Element::Unit | Element::Fin(_) => 0,
        Element::Word(w) => (w.len() as u64).max(w.iter().map(size_of).sum()),
    }
}

impl MonoidSpec {
    pub fn nat(bound: u64) -> Self {
        MonoidSpec { kind: MonoidKind::NatAdd, enumeration_bound: bound }
    }

    pub fn trivial() -> Self {
        MonoidSpec { kind: MonoidKind::Trivial, enumeration_bound: 0 }
    }

    /// Free monoid T* over a duration set D.
    pub fn durations(durations: &[u64], bound: u64) -> Self {
        let mut letters: Vec<Element> = durations.iter().map(|&t| Element::Nat(t)).collect();
        letters.sort();
        letters.dedup();
        MonoidSpec { kind: MonoidKind::FreeWords { letters }, enumeration_bound: bound }
    }

    /// 1* ≅ ℕ.
    pub fn unit_words(bound: u64) -> Self {
        MonoidSpec { kind: MonoidKind::FreeWords { letters: vec![Element::Unit] }, enumeration_bound: bound }
    }

    pub fn finite(m: FiniteMonoid) -> Self {
        MonoidSpec { kind: MonoidKind::Finite(m), enumeration_bound: 0 }
    }

    pub fn unit(&self) -> Element {
        match &self.kind {
            MonoidKind::NatAdd => Element::Nat(0),
            MonoidKind::Trivial => Element::Unit,
            MonoidKind::FreeWords { .. } => Element::Word(Vec::new()),
            MonoidKind::Finite(m) => Element::Fin(m.unit),
        }
    }

    /// Membership, including the enumeration bound.
    pub fn check(&self, e: &Element) -> Result<()> {
        let ok = match (&self.kind, e) {
            (MonoidKind::NatAdd, Element::Nat(_)) => true,
            (MonoidKind::Trivial, Element::Unit) => true,
            (MonoidKind::FreeWords { letters }, Element::Word(w)) => w.iter().all(|l| letters.contains(l)),
            (MonoidKind::Finite(m), Element::Fin(i)) => *i < m.size(),
            _ => false,
        };
        if !ok {
            return Err(Error::validation("monoid element", format!("{e} is not in the carrier")));
        }
        if matches!(self.kind, MonoidKind::NatAdd | MonoidKind::FreeWords { .. }) && size_of(e) > self.enumeration_bound {
            return Err(Error::BoundExceeded { bound: self.enumeration_bound });
        }
        Ok(())
    }

    pub fn op(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        let out = match (&self.kind, a, b) {
            (MonoidKind::NatAdd, Element::Nat(x), Element::Nat(y)) => Element::Nat(x + y),
            (MonoidKind::Trivial, _, _) => Element::Unit,
            (MonoidKind::FreeWords { .. }, Element::Word(x), Element::Word(y)) => {
                Element::Word(x.iter().chain(y).cloned().collect())
            }
            (MonoidKind::Finite(m), Element::Fin(x), Element::Fin(y)) => Element::Fin(m.op(*x, *y)),
            _ => unreachable!("checked above"),
        };
        self.check(&out)?;
        Ok(out)
    }

    /// Every element within the bound; words are listed up to the bound on length and sum.
    pub fn elements(&self) -> Vec<Element> {
        match &self.kind {
            MonoidKind::NatAdd => (0..=self.enumeration_bound).map(Element::Nat).collect(),
            MonoidKind::Trivial => vec![Element::Unit],
            MonoidKind::Finite(m) => (0..m.size()).map(Element::Fin).collect(),
            MonoidKind::FreeWords { letters } => {
                let mut out = vec![Vec::new()];
                let mut frontier = vec![Vec::new()];
                while !frontier.is_empty() {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for l in letters {
                            let mut w2: Vec<Element> = w.clone();
                            w2.push(l.clone());
                            if size_of(&Element::Word(w2.clone())) <= self.enumeration_bound {
                                next.push(w2);
                            }
                        }
                    }
                    out.extend(next.iter().cloned());
                    frontier = next;
                }
                out.into_iter().map(Element::Word).collect()
            }
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Element {
        match &self.kind {
            MonoidKind::NatAdd => Element::Nat(rng.gen_range(0..=self.enumeration_bound / 2)),
            MonoidKind::Trivial => Element::Unit,
            MonoidKind::Finite(m) => Element::Fin(rng.gen_range(0..m.size())),
            MonoidKind::FreeWords { letters } => {
                let len = rng.gen_range(0..=(self.enumeration_bound / 4).max(1).min(6));
                let mut w = Vec::new();
                for _ in 0..len {
                    let cand = letters[rng.gen_range(0..letters.len())].clone();
                    w.push(cand);
                    if size_of(&Element::Word(w.clone())) * 2 > self.enumeration_bound {
                        w.pop();
                        break;
                    }
                }
                Element::Word(w)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HomKind {
    Identity,
    /// The unique map to the trivial monoid.
    Bang,
    /// Evaluation of a word in the base monoid: sums letters.
    Counit,
    /// Letterwise application of an inner hom.
    StarLift(Box<MonoidHom>),
    /// `outer ∘ inner`: apply `inner` first.
    Compose { outer: Box<MonoidHom>, inner: Box<MonoidHom> },
    /// Map between finite monoids given elementwise.
    Table(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidHom {
    pub source: MonoidSpec,
    pub target: MonoidSpec,
    pub kind: HomKind,
}

/// The four homomorphisms of the time/silence square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CanonicalHom {
    /// Identity on T*: strong timed.
    StrongTimed,
    /// !_T^*: strong time-abstract.
    StrongAbstract,
    /// ε_T: weak timed.
    WeakTimed,
    /// !_T ∘ ε_T: weak time-abstract.
    WeakAbstract,
}

impl CanonicalHom {
    pub const ALL: [CanonicalHom; 4] =
        [CanonicalHom::StrongTimed, CanonicalHom::WeakTimed, CanonicalHom::StrongAbstract, CanonicalHom::WeakAbstract];

    pub fn key(&self) -> &'static str {
        match self {
            CanonicalHom::StrongTimed => "strong-timed",
            CanonicalHom::StrongAbstract => "strong-abstract",
            CanonicalHom::WeakTimed => "weak-timed",
            CanonicalHom::WeakAbstract => "weak-abstract",
        }
    }

    pub fn is_weak(&self) -> bool {
        matches!(self, CanonicalHom::WeakTimed | CanonicalHom::WeakAbstract)
    }

    pub fn is_timed(&self) -> bool {
        matches!(self, CanonicalHom::StrongTimed | CanonicalHom::WeakTimed)
    }

    /// The homomorphism on words over `durations`.
    pub fn hom(&self, durations: &[u64], bound: u64) -> MonoidHom {
        let words = MonoidSpec::durations(durations, bound);
        match self {
            CanonicalHom::StrongTimed => MonoidHom::identity(words),
            CanonicalHom::StrongAbstract => MonoidHom::star_lift(MonoidHom::bang(MonoidSpec::nat(bound)), words)
                .expect("bang lifts over any duration set"),
            CanonicalHom::WeakTimed => MonoidHom::counit(words).expect("durations are naturals"),
            CanonicalHom::WeakAbstract => MonoidHom::compose(
                MonoidHom::bang(MonoidSpec::nat(bound)),
                MonoidHom::counit(words).expect("durations are naturals"),
            )
            .expect("counit lands in ℕ"),
        }
    }
}

impl MonoidHom {
    pub fn identity(spec: MonoidSpec) -> Self {
        MonoidHom { source: spec.clone(), target: spec, kind: HomKind::Identity }
    }

    pub fn bang(source: MonoidSpec) -> Self {
        MonoidHom { source, target: MonoidSpec::trivial(), kind: HomKind::Bang }
    }

    /// Counit on a free monoid whose letters all live in ℕ or in 1.
    pub fn counit(source: MonoidSpec) -> Result<Self> {
        let MonoidKind::FreeWords { letters } = &source.kind else {
            return Err(Error::UnsupportedHom("counit needs a free monoid as source".into()));
        };
        let target = if letters.iter().all(|l| matches!(l, Element::Nat(_))) {
            MonoidSpec::nat(source.enumeration_bound)
        } else if letters.iter().all(|l| *l == Element::Unit) {
            MonoidSpec::trivial()
        } else {
            return Err(Error::UnsupportedHom("counit letters must be naturals or units".into()));
        };
        Ok(MonoidHom { target, source, kind: HomKind::Counit })
    }

    /// Letterwise lift of `inner` to the free monoid `source` (whose letters lie in `inner.source`).
    pub fn star_lift(inner: MonoidHom, source: MonoidSpec) -> Result<Self> {
        let MonoidKind::FreeWords { letters } = &source.kind else {
            return Err(Error::UnsupportedHom("star lift needs a free monoid as source".into()));
        };
        let mut images = Vec::new();
        for l in letters {
            let img = inner.apply(l)?;
            if !images.contains(&img) {
                images.push(img);
            }
        }
        images.sort();
        let target = MonoidSpec { kind: MonoidKind::FreeWords { letters: images }, enumeration_bound: source.enumeration_bound };
        Ok(MonoidHom { source, target, kind: HomKind::StarLift(Box::new(inner)) })
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: MonoidHom, inner: MonoidHom) -> Result<Self> {
        if !same_carrier(&inner.target, &outer.source) {
            return Err(Error::UnsupportedHom("composite homs must agree on the middle monoid".into()));
        }
        Ok(MonoidHom {
            source: inner.source.clone(),
            target: outer.target.clone(),
            kind: HomKind::Compose { outer: Box::new(outer), inner: Box::new(inner) },
        })
    }

    pub fn table(source: FiniteMonoid, target: FiniteMonoid, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.size() || map.iter().any(|&x| x >= target.size()) {
            return Err(Error::validation("hom table", "map must send every source element into the target"));
        }
        if map[source.unit] != target.unit {
            return Err(Error::validation("hom table", "unit is not preserved"));
        }
        for a in 0..source.size() {
            for b in 0..source.size() {
                if map[source.op(a, b)] != target.op(map[a], map[b]) {
                    return Err(Error::validation("hom table", format!("not multiplicative at (m{a}, m{b})")));
                }
            }
        }
        Ok(MonoidHom { source: MonoidSpec::finite(source), target: MonoidSpec::finite(target), kind: HomKind::Table(map) })
    }

    pub fn apply(&self, m: &Element) -> Result<Element> {
        self.source.check(m)?;
        match &self.kind {
            HomKind::Identity => Ok(m.clone()),
            HomKind::Bang => Ok(Element::Unit),
            HomKind::Counit => {
                let Element::Word(w) = m else { unreachable!("source checked") };
                let mut acc = self.target.unit();
                for l in w {
                    acc = match (&acc, l) {
                        (Element::Nat(a), Element::Nat(b)) => Element::Nat(a + b),
                        _ => Element::Unit,
                    };
                }
                Ok(acc)
            }
            HomKind::StarLift(inner) => {
                let Element::Word(w) = m else { unreachable!("source checked") };
                Ok(Element::Word(w.iter().map(|l| inner.apply(l)).collect::<Result<_>>()?))
            }
            HomKind::Compose { outer, inner } => outer.apply(&inner.apply(m)?),
            HomKind::Table(map) => {
                let Element::Fin(i) = m else { unreachable!("source checked") };
                Ok(Element::Fin(map[*i]))
            }
        }
    }

    /// Whether every target element within the bound has a pre-image within the bound.
    pub fn is_surjective(&self) -> bool {
        let images: Vec<Element> = self.source.elements().iter().filter_map(|m| self.apply(m).ok()).collect();
        self.target.elements().iter().all(|n| images.contains(n))
    }

    /// Recognizes the four square homomorphisms on a duration free monoid, up to the
    /// two factorizations of the diagonal.
    pub fn canonical(&self) -> Option<CanonicalHom> {
        let on_durations = |s: &MonoidSpec| {
            matches!(&s.kind, MonoidKind::FreeWords { letters } if letters.iter().all(|l| matches!(l, Element::Nat(_))))
        };
        if !on_durations(&self.source) {
            return None;
        }
        match &self.kind {
            HomKind::Identity => Some(CanonicalHom::StrongTimed),
            HomKind::StarLift(inner) if inner.kind == HomKind::Bang => Some(CanonicalHom::StrongAbstract),
            HomKind::Counit => Some(CanonicalHom::WeakTimed),
            HomKind::Compose { outer, inner } => match (&outer.kind, &inner.kind) {
                (HomKind::Bang, HomKind::Counit) => Some(CanonicalHom::WeakAbstract),
                (HomKind::Counit, HomKind::StarLift(b)) if b.kind == HomKind::Bang => Some(CanonicalHom::WeakAbstract),
                _ => None,
            },
            _ => None,
        }
    }
}

fn same_carrier(a: &MonoidSpec, b: &MonoidSpec) -> bool {
    match (&a.kind, &b.kind) {
        (MonoidKind::FreeWords { letters: x }, MonoidKind::FreeWords { letters: y }) => x == y,
        (x, y) => x == y,
    }
}
