use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::in_convex_hull;
use crate::rational::{format_rational, Rational};

/// A support point of a generator: a labelled move to a state, or acceptance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Step { label: usize, state: usize },
    Accept,
}

/// A finitely supported sub-distribution over outcomes; zero weights are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dist(BTreeMap<Outcome, Rational>);

pub type DistGenerator = Dist;

impl Dist {
    pub fn zero() -> Self {
        Dist(BTreeMap::new())
    }

    pub fn dirac(o: Outcome) -> Self {
        Dist::from_pairs([(o, Rational::one())])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Outcome, Rational)>) -> Self {
        let mut d = Dist::zero();
        for (o, w) in pairs {
            d.add(o, &w);
        }
        d
    }

    pub fn add(&mut self, o: Outcome, w: &Rational) {
        if w.is_zero() {
            return;
        }
        let e = self.0.entry(o).or_insert_with(Rational::zero);
        *e += w;
        if e.is_zero() {
            self.0.remove(&o);
        }
    }

    pub fn get(&self, o: &Outcome) -> Rational {
        self.0.get(o).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &Rational)> {
        self.0.iter()
    }

    pub fn mass(&self) -> Rational {
        self.0.values().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, c: &Rational) -> Dist {
        if c.is_zero() {
            return Dist::zero();
        }
        Dist(self.0.iter().map(|(o, w)| (*o, w * c)).collect())
    }

    pub fn plus(&self, other: &Dist) -> Dist {
        let mut d = self.clone();
        for (o, w) in &other.0 {
            d.add(*o, w);
        }
        d
    }

    /// Sums weights within `(label, block_of[state])` cells.
    pub fn project(&self, block_of: &[usize]) -> Dist {
        let mut d = Dist::zero();
        for (o, w) in &self.0 {
            let o2 = match o {
                Outcome::Step { label, state } => Outcome::Step { label: *label, state: block_of[*state] },
                Outcome::Accept => Outcome::Accept,
            };
            d.add(o2, w);
        }
        d
    }

    /// Well-formed: non-negative weights with total at most one.
    pub fn is_sub_distribution(&self) -> bool {
        self.0.values().all(|w| *w > Rational::zero()) && self.mass() <= Rational::one()
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (o, w)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match o {
                Outcome::Step { label, state } => write!(f, "{}·({label},{state})", format_rational(w))?,
                Outcome::Accept => write!(f, "{}·✓", format_rational(w))?,
            }
        }
        Ok(())
    }
}

/// Sequential composition of labels in Σ_τ; `None` when both are visible (the mass is lost).
pub fn combine_labels(first: usize, second: usize) -> Option<usize> {
    match (first, second) {
        (0, l) | (l, 0) => Some(l),
        _ => None,
    }
}

fn coordinates(gens: &[Dist]) -> Vec<Outcome> {
    let mut keys: Vec<Outcome> = gens.iter().flat_map(|d| d.0.keys().copied()).collect();
    keys.sort();
    keys.dedup();
    keys
}

fn as_vectors(gens: &[Dist], keys: &[Outcome]) -> Vec<Vec<Rational>> {
    gens.iter().map(|d| keys.iter().map(|k| d.get(k)).collect()).collect()
}

/// Whether `p` lies in the convex hull of `gens` (within `tol` per coordinate).
pub fn hull_contains(gens: &[Dist], p: &Dist, tol: &Rational) -> bool {
    if gens.is_empty() {
        return false;
    }
    if gens.contains(p) {
        return true;
    }
    let mut all = gens.to_vec();
    all.push(p.clone());
    let keys = coordinates(&all);
    let vecs = as_vectors(&all, &keys);
    let (pv, rest) = vecs.split_last().expect("non-empty");
    in_convex_hull(rest, pv, tol)
}

/// Sorted vertex list of the hull of `gens`; an empty input gives the empty set.
pub(crate) fn canonical(mut gens: Vec<Dist>) -> Vec<Dist> {
    gens.sort();
    gens.dedup();
    if gens.len() <= 1 {
        return gens;
    }
    let keys = coordinates(&gens);
    let vecs = as_vectors(&gens, &keys);
    let n = gens.len();
    let mut keep = vec![true; n];
    let zero = Rational::zero();
    for i in 0..n {
        if obviously_extreme(&vecs, &keep, i) {
            continue;
        }
        let others: Vec<Vec<Rational>> = (0..n).filter(|&j| j != i && keep[j]).map(|j| vecs[j].clone()).collect();
        if in_convex_hull(&others, &vecs[i], &zero) {
            keep[i] = false;
        }
    }
    gens.into_iter().zip(keep).filter_map(|(g, k)| k.then_some(g)).collect()
}

/// A point that strictly beats every other kept point in some coordinate is a vertex.
fn obviously_extreme(vecs: &[Vec<Rational>], keep: &[bool], i: usize) -> bool {
    let dim = vecs[i].len();
    (0..dim).any(|c| {
        let mut max_other: Option<&Rational> = None;
        let mut min_other: Option<&Rational> = None;
        for (j, v) in vecs.iter().enumerate() {
            if j == i || !keep[j] {
                continue;
            }
            if max_other.map_or(true, |m| v[c] > *m) {
                max_other = Some(&v[c]);
            }
            if min_other.map_or(true, |m| v[c] < *m) {
                min_other = Some(&v[c]);
            }
        }
        match (max_other, min_other) {
            (Some(mx), Some(mn)) => vecs[i][c] > *mx || vecs[i][c] < *mn,
            _ => true,
        }
    })
}

/// Minimal generator list of the convex hull of `gens`.
pub fn canonicalize_convex(gens: Vec<Dist>) -> Result<Vec<Dist>> {
    if gens.is_empty() {
        return Err(Error::EmptyConvexSet);
    }
    Ok(canonical(gens))
}

/// Kleisli endomorphism of the convex-set (Segala) monad.
///
/// Each state carries a canonical generator list. An empty list is the bottom element
/// (no step at all); a branch that moves into such a state loses its mass.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConvexEndo {
    dim: usize,
    gens: Vec<Vec<Dist>>,
    /// Whether acceptance mass survives being followed by this endo (true for the identity).
    halt: bool,
}

impl ConvexEndo {
    pub fn bottom(dim: usize) -> Self {
        ConvexEndo { dim, gens: vec![Vec::new(); dim], halt: false }
    }

    pub fn identity(dim: usize) -> Self {
        let gens = (0..dim).map(|x| vec![Dist::dirac(Outcome::Step { label: 0, state: x })]).collect();
        ConvexEndo { dim, gens, halt: true }
    }

    /// Builds an endo from raw per-state generator lists (canonicalized here).
    pub fn from_generators(gens: Vec<Vec<Dist>>) -> Self {
        let dim = gens.len();
        ConvexEndo { dim, gens: gens.into_iter().map(canonical).collect(), halt: false }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self, x: usize) -> &[Dist] {
        &self.gens[x]
    }

    pub fn halt(&self) -> bool {
        self.halt
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::BackendMismatch(format!("convex on {} vs {} states", self.dim, other.dim)));
        }
        Ok(())
    }

    /// `self` followed by `g`: every support point of a generator independently picks a
    /// generator of `g` at its target state.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        let raw = self.compose_raw(g)?;
        Ok(ConvexEndo { dim: self.dim, gens: raw.into_iter().map(canonical).collect(), halt: self.halt && g.halt })
    }

    /// Per-state continuations of `self ; g` before the final hull reduction.
    pub(crate) fn compose_raw(&self, g: &Self) -> Result<Vec<Vec<Dist>>> {
        self.check(g)?;
        Ok((0..self.dim).map(|x| self.gens[x].iter().flat_map(|phi| self.continue_with(phi, g)).collect()).collect())
    }

    /// Canonicalizes raw per-state lists with an explicit halt flag.
    pub(crate) fn from_parts(gens: Vec<Vec<Dist>>, halt: bool) -> Self {
        ConvexEndo { dim: gens.len(), gens: gens.into_iter().map(canonical).collect(), halt }
    }

    fn continue_with(&self, phi: &Dist, g: &Self) -> Vec<Dist> {
        let mut partial = vec![Dist::zero()];
        for (o, w) in phi.iter() {
            let options: Vec<Dist> = match o {
                Outcome::Accept if g.halt => vec![Dist::from_pairs([(Outcome::Accept, w.clone())])],
                Outcome::Accept => continue,
                Outcome::Step { label, state } => {
                    if g.gens[*state].is_empty() {
                        continue;
                    }
                    g.gens[*state].iter().map(|psi| relabel(*label, psi).scaled(w)).collect()
                }
            };
            let mut next = Vec::with_capacity(partial.len() * options.len());
            for p in &partial {
                for opt in &options {
                    next.push(p.plus(opt));
                }
            }
            partial = canonical(next);
        }
        partial
    }

    pub fn join(&self, g: &Self) -> Result<Self> {
        self.check(g)?;
        let gens = self.gens.iter().zip(&g.gens).map(|(a, b)| canonical(a.iter().chain(b).cloned().collect())).collect();
        Ok(ConvexEndo { dim: self.dim, gens, halt: self.halt || g.halt })
    }

    pub fn leq(&self, g: &Self) -> Result<bool> {
        self.leq_within(g, &Rational::zero())
    }

    pub fn leq_within(&self, g: &Self, tol: &Rational) -> Result<bool> {
        self.check(g)?;
        Ok((!self.halt || g.halt)
            && self.gens.iter().zip(&g.gens).all(|(a, b)| a.iter().all(|p| hull_contains(b, p, tol))))
    }

    /// Adds a raw generator at `x` (keeps the list canonical).
    pub fn add_generator(&mut self, x: usize, d: Dist) {
        let mut list = std::mem::take(&mut self.gens[x]);
        list.push(d);
        self.gens[x] = canonical(list);
    }

    /// Canonical generators of the hull after summing weights inside each `(label, block)` cell.
    pub fn quotient_row(&self, x: usize, block_of: &[usize]) -> Vec<Dist> {
        canonical(self.gens[x].iter().map(|d| d.project(block_of)).collect())
    }
}

fn relabel(first: usize, psi: &Dist) -> Dist {
    let mut d = Dist::zero();
    for (o, w) in psi.iter() {
        match o {
            Outcome::Step { label, state } => {
                if let Some(l) = combine_labels(first, *label) {
                    d.add(Outcome::Step { label: l, state: *state }, w);
                }
            }
            Outcome::Accept => {
                if first == 0 {
                    d.add(Outcome::Accept, w);
                }
            }
        }
    }
    d
}
