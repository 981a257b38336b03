use std::collections::BTreeMap;

use num_traits::Zero;

use super::convex::{brute_convex_weak, brute_convex_weak_untimed, same_hull, ConvexTable, ODist, OOut};
use super::{brute_weighted_weak, join_into, rule_closure_weak_accepts, rule_closure_weak_steps, OWeight};
use crate::algebra::WeightDomain;
use crate::effects::Backend;
use crate::equivalence::{LangBound, LangMode, LanguageSample, TimedWord, WordWeight};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::systems::TimedSystem;

/// Steps and acceptance a language is read from; untimed data is keyed at time 0.
enum Source {
    Matrix { steps: BTreeMap<(usize, usize, u64, usize), OWeight>, accepts: BTreeMap<(usize, u64), OWeight> },
    Convex(ConvexTable),
}

fn untime_matrix(
    steps: BTreeMap<(usize, usize, u64, usize), OWeight>,
    accepts: BTreeMap<(usize, u64), OWeight>,
) -> Source {
    let mut s = BTreeMap::new();
    for ((x, l, _, y), w) in steps {
        join_into(&mut s, (x, l, 0, y), w);
    }
    let mut a = BTreeMap::new();
    for ((x, _), w) in accepts {
        join_into(&mut a, (x, 0), w);
    }
    Source::Matrix { steps: s, accepts: a }
}

fn declared_matrix(sys: &TimedSystem) -> Source {
    let mut steps = BTreeMap::new();
    for s in sys.raw_steps() {
        if let Some(w) = OWeight::from_weight(&s.weight) {
            join_into(&mut steps, (s.from, s.label, s.dur, s.to), w);
        }
    }
    let mut accepts = BTreeMap::new();
    for a in sys.raw_accepts() {
        if let Some(w) = OWeight::from_weight(&a.weight) {
            join_into(&mut accepts, (a.state, a.dur), w);
        }
    }
    Source::Matrix { steps, accepts }
}

fn declared_convex(sys: &TimedSystem, timed: bool) -> ConvexTable {
    let mut out: ConvexTable = BTreeMap::new();
    for (&(x, t), gens) in sys.raw_convex() {
        let key = (x, if timed { t } else { 0 });
        out.entry(key).or_default().extend(gens.iter().map(super::convex::odist));
    }
    out
}

fn boolean(sys: &TimedSystem) -> bool {
    matches!(sys.backend(), Backend::NonDet | Backend::Weighted(WeightDomain::Bool))
}

/// The source for `mode` and whether it is known to be the full saturation.
fn source(sys: &TimedSystem, mode: LangMode, bound: &LangBound, depth: usize) -> Result<(Source, bool)> {
    let convex = sys.backend() == Backend::Convex;
    // simple τ-paths suffice for boolean untimed weak steps
    let horizon = 2 * sys.max_duration().max(1) * sys.len() as u64;
    Ok(match (mode, convex) {
        (LangMode::Tl, false) => (declared_matrix(sys), true),
        (LangMode::Utl, false) => {
            let Source::Matrix { steps, accepts } = declared_matrix(sys) else { unreachable!() };
            (untime_matrix(steps, accepts), true)
        }
        (LangMode::Tl, true) => (Source::Convex(declared_convex(sys, true)), true),
        (LangMode::Utl, true) => (Source::Convex(declared_convex(sys, false)), true),
        (LangMode::Wtl | LangMode::Wutl, false) => {
            let t_max = if mode == LangMode::Wtl { bound.time } else { horizon };
            let (steps, accepts, exact) = if sys.backend() == Backend::NonDet {
                let steps = rule_closure_weak_steps(sys, t_max)?.into_iter().map(|s| (s, OWeight::True)).collect();
                let accepts = rule_closure_weak_accepts(sys, t_max)?.into_iter().map(|a| (a, OWeight::True)).collect();
                (steps, accepts, true)
            } else {
                let table = brute_weighted_weak(sys, t_max, depth)?;
                let exact = table.stable && (mode == LangMode::Wtl || boolean(sys));
                (table.steps, table.accepts, exact)
            };
            if mode == LangMode::Wtl {
                (Source::Matrix { steps, accepts }, exact)
            } else {
                (untime_matrix(steps, accepts), exact)
            }
        }
        (LangMode::Wtl, true) => {
            let a = brute_convex_weak(sys, bound.time, depth)?;
            let b = brute_convex_weak(sys, bound.time, depth + 1)?;
            let stable = a.iter().all(|(k, g)| same_hull(g, &b[k]));
            (Source::Convex(a), stable)
        }
        (LangMode::Wutl, true) => {
            let a = brute_convex_weak_untimed(sys, depth)?;
            let b = brute_convex_weak_untimed(sys, depth + 1)?;
            let stable = a.iter().all(|(k, g)| same_hull(g, &b[k]));
            (Source::Convex(a), stable)
        }
    })
}

fn matrix_value(
    steps: &BTreeMap<(usize, usize, u64, usize), OWeight>,
    accepts: &BTreeMap<(usize, u64), OWeight>,
    x: usize,
    letters: &[usize],
    times: &[u64],
) -> Option<OWeight> {
    match letters.split_first() {
        None => accepts.get(&(x, times[0])).cloned(),
        Some((&sigma, rest)) => {
            let mut acc: Option<OWeight> = None;
            for (&(_, _, _, y), w) in steps.range((x, sigma, times[0], 0)..=(x, sigma, times[0], usize::MAX)) {
                if let Some(v) = matrix_value(steps, accepts, y, rest, &times[1..]) {
                    let p = w.times(&v);
                    acc = Some(match acc {
                        Some(a) => a.join(&p),
                        None => p,
                    });
                }
            }
            acc
        }
    }
}

/// Least and greatest probability over resolutions of each generator choice.
fn convex_value(table: &ConvexTable, x: usize, letters: &[usize], times: &[u64]) -> (Rational, Rational) {
    let gens: &[ODist] = table.get(&(x, times[0])).map_or(&[], Vec::as_slice);
    let vals: Vec<(Rational, Rational)> = match letters.split_first() {
        None => gens
            .iter()
            .map(|g| {
                let a = g.get(&OOut::Accept).cloned().unwrap_or_else(Rational::zero);
                (a.clone(), a)
            })
            .collect(),
        Some((&sigma, rest)) => gens
            .iter()
            .map(|g| {
                let mut lo = Rational::zero();
                let mut hi = Rational::zero();
                for (o, w) in g {
                    if let OOut::Step(l, y) = o {
                        if *l == sigma {
                            let (a, b) = convex_value(table, *y, rest, &times[1..]);
                            lo += w * a;
                            hi += w * b;
                        }
                    }
                }
                (lo, hi)
            })
            .collect(),
    };
    let lo = vals.iter().map(|v| v.0.clone()).min().unwrap_or_else(Rational::zero);
    let hi = vals.iter().map(|v| v.1.clone()).max().unwrap_or_else(Rational::zero);
    (lo, hi)
}

/// Time vectors of length `n` with entries from `choices` and sum at most `budget`.
fn time_vectors(n: usize, choices: &[u64], budget: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for &t in choices.iter().filter(|&&t| t <= budget) {
        for mut rest in time_vectors(n - 1, choices, budget - t) {
            rest.insert(0, t);
            out.push(rest);
        }
    }
    out
}

fn letter_words(n: usize, labels: usize) -> Vec<Vec<usize>> {
    let mut words = vec![Vec::new()];
    for _ in 0..n {
        words = words.into_iter().flat_map(|w| (0..labels).map(move |l| [w.clone(), vec![l]].concat())).collect();
    }
    words
}

/// Every word within `bound` that `x` accepts, found by evaluating each candidate word
/// against declared or rule-closed steps. `depth` bounds the weighted and convex closures.
pub fn brute_languages(sys: &TimedSystem, x: usize, mode: LangMode, bound: &LangBound, depth: usize) -> Result<LanguageSample> {
    if !sys.has_acceptance() {
        return Err(Error::NoAcceptance);
    }
    let (src, exact) = source(sys, mode, bound, depth)?;
    let time_choices: Vec<u64> = match mode {
        LangMode::Tl => sys.durations().to_vec(),
        LangMode::Wtl => (0..=bound.time).collect(),
        _ => vec![0],
    };
    let budget = if mode.timed() { bound.time } else { 0 };
    let mut words = BTreeMap::new();
    for n in 0..=bound.len {
        for letters in letter_words(n, sys.labels()) {
            for times in time_vectors(n + 1, &time_choices, budget) {
                let value = match &src {
                    Source::Matrix { steps, accepts } => matrix_value(steps, accepts, x, &letters, &times).map(|w| {
                        if boolean(sys) {
                            WordWeight::Bool(true)
                        } else {
                            WordWeight::Weight(w.to_weight())
                        }
                    }),
                    Source::Convex(table) => {
                        let (lo, hi) = convex_value(table, x, &letters, &times);
                        (!hi.is_zero()).then_some(WordWeight::Interval(lo, hi))
                    }
                };
                if let Some(v) = value {
                    let word = TimedWord { letters: letters.clone(), times: mode.timed().then(|| times.clone()) };
                    words.insert(word, v);
                }
            }
        }
    }
    Ok(LanguageSample { mode, bound: *bound, words, exact })
}
