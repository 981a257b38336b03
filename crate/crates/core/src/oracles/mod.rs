//! Brute-force reference implementations. Nothing here touches the effect algebra or the
//! saturation engine: steps are read from a system's declared data and closed by direct
//! transcription of the step rules, with arithmetic of its own.

mod chain;
mod convex;
mod language;

pub use chain::{monte_carlo_hitting, wilson_interval, MonteCarlo};
pub use convex::{brute_convex_weak, brute_convex_weak_untimed, odist, same_hull, ConvexTable, ODist, OOut};
pub use language::brute_languages;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::algebra::{Cost, Likelihood, Weight, WeightDomain};
use crate::effects::Backend;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::systems::TimedSystem;

/// `(x, σ, t, y)`: a saturated step `x ⇒(σ,t) y`.
pub type WeakStep = (usize, usize, u64, usize);

/// `σ` after `τ`, `τ` after `σ`, or nothing when both are visible.
pub(crate) fn seq_label(first: usize, second: usize) -> Option<usize> {
    if first == 0 {
        Some(second)
    } else if second == 0 {
        Some(first)
    } else {
        None
    }
}

fn require_boolean(sys: &TimedSystem) -> Result<()> {
    match sys.backend() {
        Backend::NonDet | Backend::Weighted(WeightDomain::Bool) => Ok(()),
        b => Err(Error::BackendMismatch(format!("rule closure needs a nondeterministic system, got {b}"))),
    }
}

fn present(w: &Weight) -> bool {
    OWeight::from_weight(w).is_some()
}

/// Least relation closed under `x ⇒(τ,0) x` and
/// `x ⇒(τ,t₀) x' →(σ,t₁) y' ⇒(τ,t₂) y  ⊢  x ⇒(σ,t₀+t₁+t₂) y`, for totals up to `t_max`.
pub fn rule_closure_weak_steps(sys: &TimedSystem, t_max: u64) -> Result<BTreeSet<WeakStep>> {
    require_boolean(sys)?;
    let raw: Vec<(usize, usize, u64, usize)> = sys
        .raw_steps()
        .iter()
        .filter(|s| present(&s.weight) && s.dur <= t_max)
        .map(|s| (s.from, s.label, s.dur, s.to))
        .collect();
    let mut rel: BTreeSet<WeakStep> = (0..sys.len()).map(|x| (x, 0, 0, x)).collect();
    loop {
        let tau: Vec<WeakStep> = rel.iter().filter(|s| s.1 == 0).copied().collect();
        let mut fresh = Vec::new();
        for &(x, _, t0, x1) in &tau {
            for &(from, sigma, t1, y1) in &raw {
                if from != x1 {
                    continue;
                }
                for &(y2, _, t2, y) in &tau {
                    if y2 != y1 {
                        continue;
                    }
                    let t = t0 + t1 + t2;
                    if t <= t_max && !rel.contains(&(x, sigma, t, y)) {
                        fresh.push((x, sigma, t, y));
                    }
                }
            }
        }
        if fresh.is_empty() {
            return Ok(rel);
        }
        rel.extend(fresh);
    }
}

/// `x ⇒(τ,t₀) x' →t₁ ✓  ⊢  x ⇒(t₀+t₁) ✓`, as `(x, t)` pairs.
pub fn rule_closure_weak_accepts(sys: &TimedSystem, t_max: u64) -> Result<BTreeSet<(usize, u64)>> {
    let rel = rule_closure_weak_steps(sys, t_max)?;
    let mut out = BTreeSet::new();
    for a in sys.raw_accepts().iter().filter(|a| present(&a.weight)) {
        for &(x, sigma, t0, y) in &rel {
            if sigma == 0 && y == a.state && t0 + a.dur <= t_max {
                out.insert((x, t0 + a.dur));
            }
        }
    }
    Ok(out)
}

/// A non-bottom weight with the oracle's own arithmetic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OWeight {
    True,
    /// `None` is ∞.
    Cost(Option<u64>),
    Prob(Rational),
}

impl OWeight {
    /// `None` for the bottom of each carrier.
    pub fn from_weight(w: &Weight) -> Option<OWeight> {
        match w {
            Weight::Bool(true) => Some(OWeight::True),
            Weight::Bool(false) | Weight::Cost(Cost::Bottom) | Weight::Likelihood(Likelihood::Bottom) => None,
            Weight::Cost(Cost::Finite(n)) => Some(OWeight::Cost(Some(*n))),
            Weight::Cost(Cost::Infinite) => Some(OWeight::Cost(None)),
            Weight::Likelihood(Likelihood::Value(r)) => Some(OWeight::Prob(r.clone())),
        }
    }

    pub fn to_weight(&self) -> Weight {
        match self {
            OWeight::True => Weight::Bool(true),
            OWeight::Cost(Some(n)) => Weight::Cost(Cost::Finite(*n)),
            OWeight::Cost(None) => Weight::Cost(Cost::Infinite),
            OWeight::Prob(r) => Weight::Likelihood(Likelihood::Value(r.clone())),
        }
    }

    pub fn unit(sys: &TimedSystem) -> OWeight {
        match sys.backend() {
            Backend::Weighted(WeightDomain::NatInfMaxPlus) => OWeight::Cost(Some(0)),
            Backend::Weighted(WeightDomain::UnitMinTimes) => OWeight::Prob(Rational::one()),
            _ => OWeight::True,
        }
    }

    /// Max for costs, min for probabilities.
    pub fn join(&self, other: &OWeight) -> OWeight {
        match (self, other) {
            (OWeight::Cost(a), OWeight::Cost(b)) => OWeight::Cost(match (a, b) {
                (Some(x), Some(y)) => Some(*x.max(y)),
                _ => None,
            }),
            (OWeight::Prob(a), OWeight::Prob(b)) => OWeight::Prob(a.min(b).clone()),
            _ => OWeight::True,
        }
    }

    /// Sum for costs, product for probabilities.
    pub fn times(&self, other: &OWeight) -> OWeight {
        match (self, other) {
            (OWeight::Cost(a), OWeight::Cost(b)) => OWeight::Cost(match (a, b) {
                (Some(x), Some(y)) => x.checked_add(*y),
                _ => None,
            }),
            (OWeight::Prob(a), OWeight::Prob(b)) => OWeight::Prob(a * b),
            _ => OWeight::True,
        }
    }
}

pub(crate) fn join_into<K: Ord>(map: &mut BTreeMap<K, OWeight>, k: K, w: OWeight) {
    match map.get_mut(&k) {
        Some(old) => *old = old.join(&w),
        None => {
            map.insert(k, w);
        }
    }
}

/// Saturated weights `x ⇒(σ,t) y` and `x ⇒t ✓` joined over at most `depth` underlying steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTable {
    pub steps: BTreeMap<WeakStep, OWeight>,
    pub accepts: BTreeMap<(usize, u64), OWeight>,
    /// One more step would change nothing, so the table is the full saturation.
    pub stable: bool,
}

type Layer = BTreeMap<WeakStep, OWeight>;

/// `⇒ₙ₊₁` from `⇒ₙ`: one declared step of duration `t'` followed by `⇒ₙ` for `t − t'`.
fn next_layer(sys: &TimedSystem, prev: &Layer, t_max: u64) -> Layer {
    let mut out = Layer::new();
    for s in sys.raw_steps() {
        let Some(w1) = OWeight::from_weight(&s.weight) else { continue };
        for (&(x2, sigma2, t2, y), w2) in prev.range((s.to, 0, 0, 0)..(s.to + 1, 0, 0, 0)) {
            debug_assert_eq!(x2, s.to);
            let t = s.dur + t2;
            if t > t_max {
                continue;
            }
            if let Some(sigma) = seq_label(s.label, sigma2) {
                join_into(&mut out, (s.from, sigma, t, y), w1.times(w2));
            }
        }
    }
    out
}

/// Direct evaluation of the step-count recursion for weighted systems, joined over
/// `n ≤ depth`, for every total time up to `t_max`.
pub fn brute_weighted_weak(sys: &TimedSystem, t_max: u64, depth: usize) -> Result<WeightTable> {
    if sys.backend() == Backend::Convex {
        return Err(Error::BackendMismatch("weighted oracle needs a matrix system".into()));
    }
    let unit = OWeight::unit(sys);
    let mut layer: Layer = (0..sys.len()).map(|x| ((x, 0, 0, x), unit.clone())).collect();
    let mut total = layer.clone();
    let mut stable = false;
    for n in 0..=depth {
        layer = next_layer(sys, &layer, t_max);
        let mut grown = total.clone();
        for (k, w) in &layer {
            join_into(&mut grown, *k, w.clone());
        }
        if n == depth {
            stable = grown == total;
            break;
        }
        total = grown;
    }
    let mut accepts = BTreeMap::new();
    for a in sys.raw_accepts() {
        let Some(wa) = OWeight::from_weight(&a.weight) else { continue };
        for (&(x, sigma, t0, y), w) in &total {
            if sigma == 0 && y == a.state && t0 + a.dur <= t_max {
                join_into(&mut accepts, (x, t0 + a.dur), w.times(&wa));
            }
        }
    }
    Ok(WeightTable { steps: total, accepts, stable })
}
