//! Kleisli endomorphism arithmetic for the three backends.

mod convex;
mod matrix;

pub use convex::{canonicalize_convex, combine_labels, hull_contains, ConvexEndo, Dist, DistGenerator, Outcome};
pub use matrix::MatrixEndo;

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{LabelQuantale, LabelSet, Labelled, Weight, WeightDomain};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Which effect a system's steps live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Backend {
    NonDet,
    Weighted(WeightDomain),
    Convex,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::NonDet => write!(f, "nondet"),
            Backend::Weighted(d) => write!(f, "weighted({})", d.key()),
            Backend::Convex => write!(f, "convex"),
        }
    }
}

pub type NonDetEndo = MatrixEndo<LabelQuantale>;
pub type WeightedEndo = MatrixEndo<Labelled<WeightDomain>>;

/// A single-stage Kleisli endomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EffectEndo {
    NonDet(NonDetEndo),
    Weighted(WeightedEndo),
    Convex(ConvexEndo),
}

/// What a state's row looks like from the outside once targets are replaced by their blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowSignature {
    Sets { cells: Vec<(usize, usize)>, accept: bool },
    Weights { cells: Vec<(usize, usize, Weight)>, accept: Weight },
    Hull(Vec<Dist>),
}

fn mismatch(a: &EffectEndo, b: &EffectEndo) -> Error {
    Error::BackendMismatch(format!("{} vs {}", a.backend(), b.backend()))
}

impl EffectEndo {
    /// `labels` counts τ.
    pub fn bottom(backend: Backend, dim: usize, labels: usize) -> Self {
        match backend {
            Backend::NonDet => EffectEndo::NonDet(MatrixEndo::bottom(LabelQuantale { labels }, dim)),
            Backend::Weighted(d) => EffectEndo::Weighted(MatrixEndo::bottom(Labelled { inner: d, labels }, dim)),
            Backend::Convex => EffectEndo::Convex(ConvexEndo::bottom(dim)),
        }
    }

    pub fn identity(backend: Backend, dim: usize, labels: usize) -> Self {
        match backend {
            Backend::NonDet => EffectEndo::NonDet(MatrixEndo::identity(LabelQuantale { labels }, dim)),
            Backend::Weighted(d) => EffectEndo::Weighted(MatrixEndo::identity(Labelled { inner: d, labels }, dim)),
            Backend::Convex => EffectEndo::Convex(ConvexEndo::identity(dim)),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            EffectEndo::NonDet(_) => Backend::NonDet,
            EffectEndo::Weighted(m) => Backend::Weighted(m.algebra().inner),
            EffectEndo::Convex(_) => Backend::Convex,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            EffectEndo::NonDet(m) => m.dim(),
            EffectEndo::Weighted(m) => m.dim(),
            EffectEndo::Convex(c) => c.dim(),
        }
    }

    /// `self` followed by `g` (diagrammatic order).
    pub fn compose(&self, g: &EffectEndo) -> Result<EffectEndo> {
        match (self, g) {
            (EffectEndo::NonDet(a), EffectEndo::NonDet(b)) => a.compose(b).map(EffectEndo::NonDet),
            (EffectEndo::Weighted(a), EffectEndo::Weighted(b)) => a.compose(b).map(EffectEndo::Weighted),
            (EffectEndo::Convex(a), EffectEndo::Convex(b)) => a.compose(b).map(EffectEndo::Convex),
            _ => Err(mismatch(self, g)),
        }
    }

    pub fn join(&self, g: &EffectEndo) -> Result<EffectEndo> {
        match (self, g) {
            (EffectEndo::NonDet(a), EffectEndo::NonDet(b)) => a.join(b).map(EffectEndo::NonDet),
            (EffectEndo::Weighted(a), EffectEndo::Weighted(b)) => a.join(b).map(EffectEndo::Weighted),
            (EffectEndo::Convex(a), EffectEndo::Convex(b)) => a.join(b).map(EffectEndo::Convex),
            _ => Err(mismatch(self, g)),
        }
    }

    pub fn leq(&self, g: &EffectEndo) -> Result<bool> {
        match (self, g) {
            (EffectEndo::NonDet(a), EffectEndo::NonDet(b)) => a.leq(b),
            (EffectEndo::Weighted(a), EffectEndo::Weighted(b)) => a.leq(b),
            (EffectEndo::Convex(a), EffectEndo::Convex(b)) => a.leq(b),
            _ => Err(mismatch(self, g)),
        }
    }

    /// Exact least saturated endo above `self ∨ id`.
    pub fn star(&self) -> Result<EffectEndo> {
        match self {
            EffectEndo::NonDet(a) => Ok(EffectEndo::NonDet(a.star())),
            EffectEndo::Weighted(a) => Ok(EffectEndo::Weighted(a.star())),
            EffectEndo::Convex(_) => Err(Error::UnsupportedExact("convex endos only have bounded_star".into())),
        }
    }

    /// `S₀ = id`, `S_{k+1} = id ∨ (f ; S_k)`, stopped early once a round changes nothing (up to
    /// `tol` for convex hulls). The flag says whether that happened within `depth` rounds.
    pub fn bounded_star(&self, depth: usize, tol: &Rational) -> Result<(EffectEndo, bool)> {
        let labels = self.labels();
        let id = EffectEndo::identity(self.backend(), self.dim(), labels);
        let mut s = id.clone();
        for _ in 0..depth {
            let next = id.join(&self.compose(&s)?)?;
            let stable = match (&next, &s) {
                (EffectEndo::Convex(n), EffectEndo::Convex(c)) if !tol.is_zero() => n.leq_within(c, tol)?,
                _ => next == s,
            };
            if stable {
                return Ok((s, true));
            }
            s = next;
        }
        Ok((s, false))
    }

    pub fn power(&self, n: usize) -> Result<EffectEndo> {
        let mut p = EffectEndo::identity(self.backend(), self.dim(), self.labels());
        for _ in 0..n {
            p = p.compose(self)?;
        }
        Ok(p)
    }

    /// Number of labels including τ (convex endos do not record it and report 0).
    pub fn labels(&self) -> usize {
        match self {
            EffectEndo::NonDet(m) => m.algebra().labels,
            EffectEndo::Weighted(m) => m.algebra().labels,
            EffectEndo::Convex(_) => 0,
        }
    }

    pub fn row_signature(&self, x: usize, block_of: &[usize]) -> RowSignature {
        match self {
            EffectEndo::NonDet(m) => {
                let (cells, accept) = m.quotient_row(x, block_of);
                RowSignature::Sets { cells: cells.into_iter().map(|(l, b, _)| (l, b)).collect(), accept }
            }
            EffectEndo::Weighted(m) => {
                let (cells, accept) = m.quotient_row(x, block_of);
                RowSignature::Weights { cells, accept }
            }
            EffectEndo::Convex(c) => RowSignature::Hull(c.quotient_row(x, block_of)),
        }
    }

    pub fn as_nondet(&self) -> Option<&NonDetEndo> {
        match self {
            EffectEndo::NonDet(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_weighted(&self) -> Option<&WeightedEndo> {
        match self {
            EffectEndo::Weighted(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_convex(&self) -> Option<&ConvexEndo> {
        match self {
            EffectEndo::Convex(c) => Some(c),
            _ => None,
        }
    }

    /// Accepting weight of `x` as a generic weight (convex: none).
    pub fn accept_weight(&self, x: usize) -> Option<Weight> {
        match self {
            EffectEndo::NonDet(m) => Some(Weight::Bool(*m.accept(x))),
            EffectEndo::Weighted(m) => Some(m.accept(x).clone()),
            EffectEndo::Convex(_) => None,
        }
    }

    /// `(x, label, y, weight)` entries; NonDet weights are `Bool(true)`.
    pub fn matrix_steps(&self) -> Vec<(usize, usize, usize, Weight)> {
        match self {
            EffectEndo::NonDet(m) => m.steps().into_iter().map(|(x, l, y, _)| (x, l, y, Weight::Bool(true))).collect(),
            EffectEndo::Weighted(m) => m.steps(),
            EffectEndo::Convex(_) => Vec::new(),
        }
    }
}

/// Converts a NonDet endo to the isomorphic Boolean-weighted one.
pub fn nondet_to_bool_weighted(m: &NonDetEndo) -> WeightedEndo {
    let labels = m.algebra().labels;
    let mut out = MatrixEndo::bottom(Labelled { inner: WeightDomain::Bool, labels }, m.dim());
    for (x, l, y, _) in m.steps() {
        out.add_step(x, l, y, Weight::Bool(true));
    }
    for x in 0..m.dim() {
        if *m.accept(x) {
            out.add_accept(x, Weight::Bool(true));
        }
    }
    out.set_halt(Weight::Bool(*m.halt()));
    out
}

/// Set of labels on the `(x, y)` entry of a NonDet endo.
pub fn label_set(m: &NonDetEndo, x: usize, y: usize) -> LabelSet {
    *m.cell(x, y)
}

#[cfg(test)]
mod tests;
