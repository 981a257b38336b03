//! Bisimulation partitions, language equivalences and the spectrum.

mod language;
mod spectrum;

pub use language::{
    language_equivalent, language_partition, language_table, languages, LangBound, LangMode, LanguageSample,
    LanguageTable, TimedWord, Verdict, WordWeight,
};
pub use spectrum::{point_name, spectrum, EdgeCheck, EdgeStatus, Point, Relation, Semantics, SpectrumReport, HASSE_EDGES};

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::effects::RowSignature;
use crate::saturation::SaturatedFamily;

/// Block id per state; blocks are numbered by least member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition {
    block_of: Vec<usize>,
}

impl Partition {
    /// Renumbers arbitrary block labels into canonical form.
    pub fn from_labels<K: Ord + Clone>(labels: &[K]) -> Self {
        let mut ids: BTreeMap<K, usize> = BTreeMap::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for k in labels {
            let next = ids.len();
            block_of.push(*ids.entry(k.clone()).or_insert(next));
        }
        Partition { block_of }
    }

    pub fn trivial(n: usize) -> Self {
        Partition { block_of: vec![0; n] }
    }

    pub fn discrete(n: usize) -> Self {
        Partition { block_of: (0..n).collect() }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Self {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &x in block {
                labels[x] = b;
            }
        }
        // states not mentioned become singletons
        for (x, l) in labels.iter_mut().enumerate() {
            if *l == usize::MAX {
                *l = blocks.len() + x;
            }
        }
        Partition::from_labels(&labels)
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    pub fn num_blocks(&self) -> usize {
        self.block_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    pub fn same(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    /// Every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.first_violation(coarser).is_none()
    }

    /// A pair related by `self` but not by `coarser`.
    pub fn first_violation(&self, coarser: &Partition) -> Option<(usize, usize)> {
        let mut rep: BTreeMap<usize, usize> = BTreeMap::new();
        for x in 0..self.len() {
            let r = *rep.entry(self.block_of[x]).or_insert(x);
            if !coarser.same(r, x) {
                return Some((r, x));
            }
        }
        None
    }

    /// Merges the blocks of `x` and `y`.
    pub fn merge(&self, x: usize, y: usize) -> Partition {
        let (a, b) = (self.block_of[x], self.block_of[y]);
        let labels: Vec<usize> = self.block_of.iter().map(|&k| if k == b { a } else { k }).collect();
        Partition::from_labels(&labels)
    }

    pub fn render(&self, names: &[String]) -> String {
        self.blocks()
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|&x| names[x].as_str()).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.len()).map(|x| x.to_string()).collect();
        write!(f, "{}", self.render(&names))
    }
}

/// Row signatures of `x` over all members, with targets replaced by blocks of `p`.
pub fn signature(fam: &SaturatedFamily, p: &Partition, x: usize) -> Vec<RowSignature> {
    fam.members.values().map(|m| m.row_signature(x, p.block_of())).collect()
}

/// One refinement round: split every block by signature.
pub fn refine(fam: &SaturatedFamily, p: &Partition) -> Partition {
    let keys: Vec<(usize, Vec<RowSignature>)> =
        (0..p.len()).map(|x| (p.block_of()[x], signature(fam, p, x))).collect();
    Partition::from_labels(&keys)
}

/// Coarsest partition whose blocks have uniform signatures, by naive refinement from the
/// trivial partition.
pub fn coarsest_bisimulation(fam: &SaturatedFamily) -> Partition {
    let mut p = Partition::trivial(fam.dim());
    loop {
        let next = refine(fam, &p);
        if next == p {
            return p;
        }
        p = next;
    }
}

/// Whether every block of `r` has uniform signatures with respect to `r` itself.
pub fn check_bisimulation(fam: &SaturatedFamily, r: &Partition) -> bool {
    if r.len() != fam.dim() {
        return false;
    }
    r.blocks().iter().all(|b| {
        let first = signature(fam, r, b[0]);
        b[1..].iter().all(|&x| signature(fam, r, x) == first)
    })
}

/// Outcome of a pairwise bisimilarity query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum BisimVerdict {
    Equivalent,
    Distinguished,
    /// Related on the materialized members only.
    BoundedEqual { t_max: u64, depth: usize },
    /// Separated, but only by under-approximated members.
    BoundedDistinguished { t_max: u64, depth: usize },
}

/// Verdict for `x` against `y` on the coarsest partition of `fam`.
pub fn bisimilar(fam: &SaturatedFamily, p: &Partition, x: usize, y: usize) -> BisimVerdict {
    let same = p.same(x, y);
    let (t_max, depth) = (fam.bounds.t_max, fam.bounds.depth);
    match (same, fam.exact, fam.complete) {
        (true, true, true) => BisimVerdict::Equivalent,
        (true, _, _) => BisimVerdict::BoundedEqual { t_max, depth },
        (false, true, _) => BisimVerdict::Distinguished,
        (false, false, _) => BisimVerdict::BoundedDistinguished { t_max, depth },
    }
}

#[cfg(test)]
mod tests;
