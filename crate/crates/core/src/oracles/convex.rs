use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::seq_label;
use crate::effects::{Backend, Dist, Outcome};
use crate::error::{Error, Result};
use crate::linear::in_convex_hull;
use crate::rational::Rational;
use crate::systems::TimedSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OOut {
    Step(usize, usize),
    Accept,
}

/// A sub-distribution with no zero entries.
pub type ODist = BTreeMap<OOut, Rational>;

/// Hull generators per `(state, time)`.
pub type ConvexTable = BTreeMap<(usize, u64), Vec<ODist>>;

pub fn odist(d: &Dist) -> ODist {
    d.iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(o, w)| {
            let k = match o {
                Outcome::Step { label, state } => OOut::Step(*label, *state),
                Outcome::Accept => OOut::Accept,
            };
            (k, w.clone())
        })
        .collect()
}

fn add(d: &mut ODist, k: OOut, w: Rational) {
    if w.is_zero() {
        return;
    }
    let e = d.entry(k).or_insert_with(Rational::zero);
    *e += w;
}

fn vectors(points: &[ODist]) -> (Vec<OOut>, Vec<Vec<Rational>>) {
    let keys: Vec<OOut> = points.iter().flat_map(|d| d.keys().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    let vecs = points
        .iter()
        .map(|d| keys.iter().map(|k| d.get(k).cloned().unwrap_or_else(Rational::zero)).collect())
        .collect();
    (keys, vecs)
}

/// Drops duplicates and every point inside the hull of the others.
pub fn prune(points: Vec<ODist>) -> Vec<ODist> {
    let mut pts: Vec<ODist> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let mut i = 0;
    while i < pts.len() && pts.len() > 1 {
        let (_, vecs) = vectors(&pts);
        let others: Vec<Vec<Rational>> = (0..pts.len()).filter(|&j| j != i).map(|j| vecs[j].clone()).collect();
        if in_convex_hull(&others, &vecs[i], &Rational::zero()) {
            pts.remove(i);
        } else {
            i += 1;
        }
    }
    pts
}

/// Mutual hull containment, exact.
pub fn same_hull(a: &[ODist], b: &[ODist]) -> bool {
    if a.is_empty() || b.is_empty() {
        return a.is_empty() && b.is_empty();
    }
    let all: Vec<ODist> = a.iter().chain(b).cloned().collect();
    let (_, vecs) = vectors(&all);
    let (va, vb) = vecs.split_at(a.len());
    vb.iter().all(|p| in_convex_hull(va, p, &Rational::zero())) && va.iter().all(|p| in_convex_hull(vb, p, &Rational::zero()))
}

fn declared(sys: &TimedSystem) -> Result<BTreeMap<(usize, u64), Vec<ODist>>> {
    if sys.backend() != Backend::Convex {
        return Err(Error::BackendMismatch(format!("convex oracle needs a convex system, got {}", sys.backend())));
    }
    Ok(sys.raw_convex().iter().map(|(k, gens)| (*k, gens.iter().map(odist).collect())).collect())
}

/// Every way of continuing the support points of `phi`, each independently.
/// `cont(state)` lists the continuations; `halted` says whether ✓ in `phi` survives.
fn extend(phi: &ODist, cont: &dyn Fn(usize) -> Vec<ODist>, halted: bool) -> Vec<ODist> {
    let mut partial: Vec<ODist> = vec![ODist::new()];
    for (o, w) in phi {
        let options: Vec<ODist> = match o {
            OOut::Accept if halted => vec![ODist::from([(OOut::Accept, w.clone())])],
            OOut::Accept => continue,
            OOut::Step(sigma, y) => {
                let ks = cont(*y);
                if ks.is_empty() {
                    // nothing to continue with: the mass is lost
                    continue;
                }
                ks.iter()
                    .map(|psi| {
                        let mut d = ODist::new();
                        for (o2, w2) in psi {
                            match o2 {
                                OOut::Step(s2, z) => {
                                    if let Some(l) = seq_label(*sigma, *s2) {
                                        add(&mut d, OOut::Step(l, *z), w * w2);
                                    }
                                }
                                OOut::Accept if *sigma == 0 => add(&mut d, OOut::Accept, w * w2),
                                OOut::Accept => {}
                            }
                        }
                        d
                    })
                    .collect()
            }
        };
        let mut next = Vec::new();
        for p in &partial {
            for opt in &options {
                let mut q = p.clone();
                for (k, v) in opt {
                    add(&mut q, *k, v.clone());
                }
                next.push(q);
            }
        }
        partial = prune(next);
    }
    partial
}

fn dirac_tau(x: usize) -> ODist {
    ODist::from([(OOut::Step(0, x), Rational::one())])
}

/// The graded step recursion: `⇒₀` is the Dirac at `(τ, x)` in time 0; `⇒ₖ₊₁` adds one
/// declared step of duration `t'` whose support points continue independently by `⇒ₖ` in
/// the remaining `t − t'`. Returned at level `depth`, for every time up to `t_max`.
pub fn brute_convex_weak(sys: &TimedSystem, t_max: u64, depth: usize) -> Result<ConvexTable> {
    let raw = declared(sys)?;
    let n = sys.len();
    let mut level: ConvexTable = BTreeMap::new();
    for x in 0..n {
        for t in 0..=t_max {
            level.insert((x, t), if t == 0 { vec![dirac_tau(x)] } else { Vec::new() });
        }
    }
    for _ in 0..depth {
        let mut next = level.clone();
        for x in 0..n {
            for t in 0..=t_max {
                let mut gens = level[&(x, t)].clone();
                for (&(from, t1), phis) in &raw {
                    if from != x || t1 > t {
                        continue;
                    }
                    let rest = t - t1;
                    let cont = |y: usize| level[&(y, rest)].clone();
                    for phi in phis {
                        gens.extend(extend(phi, &cont, rest == 0));
                    }
                }
                next.insert((x, t), prune(gens));
            }
        }
        level = next;
    }
    Ok(level)
}

/// Untimed version: steps of any duration, ✓ always survives. Keyed with time 0.
pub fn brute_convex_weak_untimed(sys: &TimedSystem, depth: usize) -> Result<ConvexTable> {
    let raw = declared(sys)?;
    let n = sys.len();
    let mut level: Vec<Vec<ODist>> = (0..n).map(|x| vec![dirac_tau(x)]).collect();
    for _ in 0..depth {
        let mut next = Vec::with_capacity(n);
        for x in 0..n {
            let mut gens = level[x].clone();
            for (&(from, _), phis) in &raw {
                if from != x {
                    continue;
                }
                let cont = |y: usize| level[y].clone();
                for phi in phis {
                    gens.extend(extend(phi, &cont, true));
                }
            }
            next.push(prune(gens));
        }
        level = next;
    }
    Ok(level.into_iter().enumerate().map(|(x, g)| ((x, 0), g)).collect())
}
