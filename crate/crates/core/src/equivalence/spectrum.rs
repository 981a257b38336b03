use serde::Serialize;

use super::language::{language_partition, LangBound, LangMode};
use super::{coarsest_bisimulation, Partition};
use crate::algebra::CanonicalHom;
use crate::error::Result;
use crate::saturation::{saturate_canonical, Bounds};
use crate::systems::TimedSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    Bisim,
    Lang,
}

/// One point of the spectrum.
pub type Point = (CanonicalHom, Semantics);

use CanonicalHom::{StrongAbstract as SA, StrongTimed as ST, WeakAbstract as WA, WeakTimed as WT};
use Semantics::{Bisim as B, Lang as L};

/// `(finer, coarser)` pairs of the spectrum's Hasse diagram.
pub const HASSE_EDGES: [(Point, Point); 12] = [
    ((ST, B), (WT, B)),
    ((ST, B), (SA, B)),
    ((WT, B), (WA, B)),
    ((SA, B), (WA, B)),
    ((ST, B), (ST, L)),
    ((WT, B), (WT, L)),
    ((SA, B), (SA, L)),
    ((WA, B), (WA, L)),
    ((ST, L), (WT, L)),
    ((ST, L), (SA, L)),
    ((WT, L), (WA, L)),
    ((SA, L), (WA, L)),
];

pub fn point_name(p: Point) -> String {
    format!("{} {}", p.0.key(), if p.1 == B { "bisim" } else { "lang" })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub hom: CanonicalHom,
    pub semantics: Semantics,
    pub partition: Partition,
    /// Exact rather than read off bounded data.
    pub conclusive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EdgeStatus {
    Holds,
    Violated { x: usize, y: usize },
    Unchecked { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeCheck {
    pub finer: String,
    pub coarser: String,
    pub status: EdgeStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub relations: Vec<Relation>,
    pub edges: Vec<EdgeCheck>,
}

impl SpectrumReport {
    pub fn relation(&self, p: Point) -> Option<&Relation> {
        self.relations.iter().find(|r| (r.hom, r.semantics) == p)
    }

    pub fn all_pass(&self) -> bool {
        self.edges.iter().all(|e| !matches!(e.status, EdgeStatus::Violated { .. }))
    }

    pub fn violations(&self) -> impl Iterator<Item = &EdgeCheck> {
        self.edges.iter().filter(|e| matches!(e.status, EdgeStatus::Violated { .. }))
    }
}

/// The four bisimulation partitions, the language partitions when the system accepts, and
/// every Hasse edge checked as refinement on this instance.
///
/// Edges between two bounded language partitions are not checked: bounded equality is not
/// monotone along them.
pub fn spectrum(sys: &TimedSystem, bounds: &Bounds, lang: &LangBound) -> Result<SpectrumReport> {
    let mut relations = Vec::new();
    for hom in CanonicalHom::ALL {
        let fam = saturate_canonical(sys, hom, bounds)?;
        relations.push(Relation {
            hom,
            semantics: B,
            partition: coarsest_bisimulation(&fam),
            conclusive: fam.conclusive(),
        });
    }
    if sys.has_acceptance() {
        for mode in LangMode::ALL {
            let (partition, exact) = language_partition(sys, mode, lang)?;
            relations.push(Relation { hom: mode.hom(), semantics: L, partition, conclusive: exact });
        }
    }
    let find = |p: Point| relations.iter().find(|r| (r.hom, r.semantics) == p);
    let edges = HASSE_EDGES
        .iter()
        .map(|&(f, c)| {
            let status = match (find(f), find(c)) {
                (Some(a), Some(b)) if f.1 == L && !(a.conclusive && b.conclusive) => {
                    EdgeStatus::Unchecked { reason: "bounded languages".into() }
                }
                (Some(a), Some(b)) => match a.partition.first_violation(&b.partition) {
                    None => EdgeStatus::Holds,
                    Some((x, y)) => EdgeStatus::Violated { x, y },
                },
                _ => EdgeStatus::Unchecked { reason: "no acceptance".into() },
            };
            EdgeCheck { finer: point_name(f), coarser: point_name(c), status }
        })
        .collect();
    Ok(SpectrumReport { relations, edges })
}
