//! Accepted languages: exact automata comparison for non-deterministic systems, bounded
//! enumeration for weighted and convex ones.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use super::Partition;
use crate::algebra::{CanonicalHom, StarQuantale, Weight, WeightDomain};
use crate::effects::{nondet_to_bool_weighted, Backend, EffectEndo, Outcome, WeightedEndo};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};
use crate::saturation::{saturate_canonical, Bounds};
use crate::systems::TimedSystem;

/// Which of the four accepted languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LangMode {
    /// Strong timed.
    Tl,
    /// Strong untimed.
    Utl,
    /// Weak timed.
    Wtl,
    /// Weak untimed.
    Wutl,
}

impl LangMode {
    pub const ALL: [LangMode; 4] = [LangMode::Tl, LangMode::Wtl, LangMode::Utl, LangMode::Wutl];

    pub fn from_hom(h: CanonicalHom) -> Self {
        match h {
            CanonicalHom::StrongTimed => LangMode::Tl,
            CanonicalHom::StrongAbstract => LangMode::Utl,
            CanonicalHom::WeakTimed => LangMode::Wtl,
            CanonicalHom::WeakAbstract => LangMode::Wutl,
        }
    }

    pub fn hom(&self) -> CanonicalHom {
        match self {
            LangMode::Tl => CanonicalHom::StrongTimed,
            LangMode::Utl => CanonicalHom::StrongAbstract,
            LangMode::Wtl => CanonicalHom::WeakTimed,
            LangMode::Wutl => CanonicalHom::WeakAbstract,
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            LangMode::Tl => "tl",
            LangMode::Utl => "utl",
            LangMode::Wtl => "wtl",
            LangMode::Wutl => "wutl",
        }
    }

    pub fn timed(&self) -> bool {
        matches!(self, LangMode::Tl | LangMode::Wtl)
    }

    pub fn weak(&self) -> bool {
        matches!(self, LangMode::Wtl | LangMode::Wutl)
    }
}

/// Enumeration bound: at most `len` letters and total time at most `time`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LangBound {
    pub len: usize,
    pub time: u64,
}

impl LangBound {
    pub fn defaults(sys: &TimedSystem) -> Self {
        let len = 3;
        LangBound { len, time: sys.max_duration() * (len as u64 + 1) }
    }
}

/// `t₀ σ₁ t₁ … σₙ tₙ`; untimed words carry no times.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TimedWord {
    pub letters: Vec<usize>,
    /// `letters.len() + 1` times when timed.
    pub times: Option<Vec<u64>>,
}

impl TimedWord {
    pub fn render(&self, sys: &TimedSystem) -> String {
        let mut parts = Vec::new();
        match &self.times {
            Some(times) => {
                for (i, t) in times.iter().enumerate() {
                    parts.push(t.to_string());
                    if let Some(&l) = self.letters.get(i) {
                        parts.push(sys.label_name(l).to_string());
                    }
                }
            }
            None if self.letters.is_empty() => parts.push("ε".into()),
            None => parts.extend(self.letters.iter().map(|&l| sys.label_name(l).to_string())),
        }
        parts.join("·")
    }
}

/// The value a language assigns to a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WordWeight {
    Bool(bool),
    Weight(Weight),
    /// Least and greatest probability over all resolutions of the convex choices.
    Interval(Rational, Rational),
}

impl WordWeight {
    fn is_bottom(&self) -> bool {
        match self {
            WordWeight::Bool(b) => !b,
            WordWeight::Weight(w) => match w {
                Weight::Bool(b) => !b,
                Weight::Cost(c) => *c == crate::algebra::Cost::Bottom,
                Weight::Likelihood(l) => *l == crate::algebra::Likelihood::Bottom,
            },
            WordWeight::Interval(lo, hi) => lo.is_zero() && hi.is_zero(),
        }
    }
}

impl fmt::Display for WordWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordWeight::Bool(b) => write!(f, "{b}"),
            WordWeight::Weight(w) => write!(f, "{w}"),
            WordWeight::Interval(lo, hi) => write!(f, "[{},{}]", format_rational(lo), format_rational(hi)),
        }
    }
}

/// Words accepted by one state within a bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageSample {
    pub mode: LangMode,
    pub bound: LangBound,
    pub words: BTreeMap<TimedWord, WordWeight>,
    /// All stars behind the sample converged.
    pub exact: bool,
}

/// Word values for every state at once; only words some state accepts are listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageTable {
    pub mode: LangMode,
    pub bound: LangBound,
    pub words: Vec<TimedWord>,
    /// `values[w][x]`.
    pub values: Vec<Vec<WordWeight>>,
    pub exact: bool,
}

impl LanguageTable {
    pub fn column(&self, x: usize) -> Vec<&WordWeight> {
        self.values.iter().map(|row| &row[x]).collect()
    }

    /// First word on which `x` and `y` differ.
    pub fn first_difference(&self, x: usize, y: usize) -> Option<&TimedWord> {
        self.words.iter().zip(&self.values).find(|(_, row)| row[x] != row[y]).map(|(w, _)| w)
    }
}

/// Steps a language is read off: keyed by duration, or a single untimed step.
struct Steps {
    timed: bool,
    endos: Vec<(u64, EffectEndo)>,
    exact: bool,
}

fn language_steps(sys: &TimedSystem, mode: LangMode, bound: &LangBound) -> Result<Steps> {
    let depth = if sys.backend() == Backend::Convex { 8 } else { sys.len().max(1) };
    let mut exact = true;
    let endos: Vec<(u64, EffectEndo)> = match mode {
        LangMode::Tl => sys.steps().iter().map(|(&t, e)| (t, e.clone())).collect(),
        LangMode::Utl => {
            let mut u = sys.bottom();
            for e in sys.steps().values() {
                u = u.join(e)?;
            }
            vec![(0, u)]
        }
        LangMode::Wtl => {
            let fam = saturate_canonical(sys, CanonicalHom::WeakTimed, &Bounds::fixed(bound.time, depth))?;
            exact = fam.exact;
            fam.members
                .into_iter()
                .filter_map(|(e, m)| match e {
                    crate::algebra::Element::Nat(t) if t <= bound.time => Some((t, m)),
                    _ => None,
                })
                .collect()
        }
        LangMode::Wutl => {
            let fam = saturate_canonical(sys, CanonicalHom::WeakAbstract, &Bounds::fixed(bound.time, depth))?;
            exact = fam.exact;
            fam.members.into_values().map(|m| (0, m)).collect()
        }
    };
    Ok(Steps { timed: mode.timed(), endos, exact })
}

enum Column {
    Weights(WeightDomain, Vec<Weight>),
    Intervals(Vec<(Rational, Rational)>),
}

impl Column {
    fn values(&self) -> Vec<WordWeight> {
        match self {
            Column::Weights(WeightDomain::Bool, v) => {
                v.iter().map(|w| WordWeight::Bool(*w == Weight::Bool(true))).collect()
            }
            Column::Weights(_, v) => v.iter().cloned().map(WordWeight::Weight).collect(),
            Column::Intervals(v) => v.iter().map(|(a, b)| WordWeight::Interval(a.clone(), b.clone())).collect(),
        }
    }

    fn all_bottom(&self) -> bool {
        match self {
            Column::Weights(d, v) => v.iter().all(|w| d.is_bottom(w)),
            Column::Intervals(v) => v.iter().all(|(a, b)| a.is_zero() && b.is_zero()),
        }
    }
}

enum View {
    Matrix(WeightedEndo),
    Convex(crate::effects::ConvexEndo),
}

fn view(e: &EffectEndo) -> View {
    match e {
        EffectEndo::NonDet(m) => View::Matrix(nondet_to_bool_weighted(m)),
        EffectEndo::Weighted(m) => View::Matrix(m.clone()),
        EffectEndo::Convex(c) => View::Convex(c.clone()),
    }
}

fn accept_column(v: &View, dim: usize) -> Column {
    match v {
        View::Matrix(m) => Column::Weights(m.algebra().inner, (0..dim).map(|x| m.accept(x).clone()).collect()),
        View::Convex(c) => Column::Intervals(
            (0..dim)
                .map(|x| {
                    let vals: Vec<Rational> = c.generators(x).iter().map(|g| g.get(&Outcome::Accept)).collect();
                    min_max(vals)
                })
                .collect(),
        ),
    }
}

fn min_max(vals: Vec<Rational>) -> (Rational, Rational) {
    let lo = vals.iter().min().cloned().unwrap_or_else(Rational::zero);
    let hi = vals.iter().max().cloned().unwrap_or_else(Rational::zero);
    (lo, hi)
}

/// Value of `σ·S` from every state, given the column of `S`.
fn extend_column(v: &View, label: usize, col: &Column, dim: usize) -> Column {
    match (v, col) {
        (View::Matrix(m), Column::Weights(d, after)) => {
            let out = (0..dim)
                .map(|x| {
                    let mut acc = d.bottom();
                    for (y, w) in after.iter().enumerate() {
                        let step = m.weight(x, label, y);
                        if !d.is_bottom(&step) && !d.is_bottom(w) {
                            acc = d.join(&acc, &d.mult(&step, w));
                        }
                    }
                    acc
                })
                .collect();
            Column::Weights(*d, out)
        }
        (View::Convex(c), Column::Intervals(after)) => Column::Intervals(
            (0..dim)
                .map(|x| {
                    let gens = c.generators(x);
                    let lo: Vec<Rational> = gens
                        .iter()
                        .map(|g| {
                            g.iter()
                                .filter_map(|(o, w)| match o {
                                    Outcome::Step { label: l, state } if *l == label => Some(w * &after[*state].0),
                                    _ => None,
                                })
                                .fold(Rational::zero(), |a, b| a + b)
                        })
                        .collect();
                    let hi: Vec<Rational> = gens
                        .iter()
                        .map(|g| {
                            g.iter()
                                .filter_map(|(o, w)| match o {
                                    Outcome::Step { label: l, state } if *l == label => Some(w * &after[*state].1),
                                    _ => None,
                                })
                                .fold(Rational::zero(), |a, b| a + b)
                        })
                        .collect();
                    (min_max(lo).0, min_max(hi).1)
                })
                .collect(),
        ),
        _ => unreachable!("columns follow their endo's backend"),
    }
}

/// Every word within `bound` that some state accepts, with its value at every state.
pub fn language_table(sys: &TimedSystem, mode: LangMode, bound: &LangBound) -> Result<LanguageTable> {
    if !sys.has_acceptance() {
        return Err(Error::NoAcceptance);
    }
    let steps = language_steps(sys, mode, bound)?;
    let views: Vec<(u64, View)> = steps.endos.iter().map(|(t, e)| (*t, view(e))).collect();
    let dim = sys.len();
    let mut rows: Vec<(TimedWord, Vec<WordWeight>)> = Vec::new();
    // suffix-first generation: (column, letters, times, time used)
    let mut frontier: Vec<(Column, Vec<usize>, Vec<u64>, u64)> = Vec::new();
    for (t, v) in &views {
        if steps.timed && *t > bound.time {
            continue;
        }
        let col = accept_column(v, dim);
        if !col.all_bottom() {
            frontier.push((col, Vec::new(), vec![*t], if steps.timed { *t } else { 0 }));
        }
    }
    for n in 0..=bound.len {
        let mut next = Vec::new();
        for (col, letters, times, used) in frontier {
            let word = TimedWord { letters: letters.clone(), times: steps.timed.then(|| times.clone()) };
            rows.push((word, col.values()));
            if n == bound.len {
                continue;
            }
            for (t, v) in &views {
                if steps.timed && used + t > bound.time {
                    continue;
                }
                for label in 0..sys.labels() {
                    let c = extend_column(v, label, &col, dim);
                    if c.all_bottom() {
                        continue;
                    }
                    let mut l2 = vec![label];
                    l2.extend(&letters);
                    let mut t2 = vec![*t];
                    t2.extend(&times);
                    next.push((c, l2, t2, used + if steps.timed { *t } else { 0 }));
                }
            }
        }
        frontier = next;
    }
    // untimed words arise once per duration key; keep the join (all keys are 0 here, so one)
    rows.sort_by(|a, b| (a.0.letters.len(), &a.0).cmp(&(b.0.letters.len(), &b.0)));
    rows.dedup_by(|a, b| a.0 == b.0);
    let (words, values) = rows.into_iter().unzip();
    Ok(LanguageTable { mode, bound: *bound, words, values, exact: steps.exact })
}

/// The words `x` accepts within `bound`.
pub fn languages(sys: &TimedSystem, x: usize, mode: LangMode, bound: &LangBound) -> Result<LanguageSample> {
    let table = language_table(sys, mode, bound)?;
    let words = table
        .words
        .iter()
        .zip(&table.values)
        .filter(|(_, row)| !row[x].is_bottom())
        .map(|(w, row)| (w.clone(), row[x].clone()))
        .collect();
    Ok(LanguageSample { mode, bound: *bound, words, exact: table.exact })
}

/// Outcome of a language comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Equal,
    BoundedEqual { len: usize, time: u64 },
    Distinguished { word: TimedWord },
    /// A difference within the bound on under-approximated steps.
    BoundedDistinguished { word: TimedWord },
}

fn is_boolean(sys: &TimedSystem) -> bool {
    matches!(sys.backend(), Backend::NonDet | Backend::Weighted(WeightDomain::Bool))
}

/// Compares the languages of `x` and `y`: exactly via automata for Boolean systems,
/// otherwise on the words within `bound`.
pub fn language_equivalent(sys: &TimedSystem, x: usize, y: usize, mode: LangMode, bound: &LangBound) -> Result<Verdict> {
    if !sys.has_acceptance() {
        return Err(Error::NoAcceptance);
    }
    if is_boolean(sys) {
        let nfa = Nfa::new(sys, mode);
        return Ok(match nfa.distinguish(x, y) {
            None => Verdict::Equal,
            Some(word) => Verdict::Distinguished { word },
        });
    }
    let table = language_table(sys, mode, bound)?;
    Ok(match (table.first_difference(x, y), table.exact) {
        (None, _) => Verdict::BoundedEqual { len: bound.len, time: bound.time },
        (Some(w), true) => Verdict::Distinguished { word: w.clone() },
        (Some(w), false) => Verdict::BoundedDistinguished { word: w.clone() },
    })
}

/// Partition by language equality; the flag says whether it is exact.
pub fn language_partition(sys: &TimedSystem, mode: LangMode, bound: &LangBound) -> Result<(Partition, bool)> {
    if !sys.has_acceptance() {
        return Err(Error::NoAcceptance);
    }
    if is_boolean(sys) {
        let nfa = Nfa::new(sys, mode);
        let mut reps: Vec<usize> = Vec::new();
        let mut labels = vec![0; sys.len()];
        for x in 0..sys.len() {
            match reps.iter().position(|&r| nfa.distinguish(r, x).is_none()) {
                Some(i) => labels[x] = i,
                None => {
                    labels[x] = reps.len();
                    reps.push(x);
                }
            }
        }
        return Ok((Partition::from_labels(&labels), true));
    }
    let table = language_table(sys, mode, bound)?;
    let cols: Vec<Vec<&WordWeight>> = (0..sys.len()).map(|x| table.column(x)).collect();
    Ok((Partition::from_labels(&cols), false))
}

// ---------------------------------------------------------------------------------------------
// automata for Boolean systems

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    Final,
    /// `phase` 0 is before the visible step, `1 + σ` after a σ step that is not yet emitted;
    /// `k` counts ticks waited at `x`.
    S { x: usize, phase: usize, k: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Letter {
    Tick,
    Label(usize),
    Accept,
}

/// Tick-encoded automaton: a step of duration t is t ticks followed by its letter.
struct Nfa {
    mode: LangMode,
    labels: usize,
    max_wait: u64,
    steps: Vec<Vec<(usize, u64, usize)>>,
    accepts: Vec<Vec<u64>>,
}

impl Nfa {
    fn new(sys: &TimedSystem, mode: LangMode) -> Self {
        let mut steps = vec![Vec::new(); sys.len()];
        for s in sys.raw_steps() {
            steps[s.from].push((s.label, s.dur, s.to));
        }
        let mut accepts = vec![Vec::new(); sys.len()];
        for a in sys.raw_accepts() {
            accepts[a.state].push(a.dur);
        }
        Nfa { mode, labels: sys.labels(), max_wait: sys.max_duration(), steps, accepts }
    }

    fn moves(&self, n: Node, out: &mut Vec<(Option<Letter>, Node)>) {
        let Node::S { x, phase, k } = n else { return };
        let timed = self.mode.timed();
        let fits = |t: u64| !timed || t == k;
        if timed && k < self.max_wait {
            out.push((Some(Letter::Tick), Node::S { x, phase, k: k + 1 }));
        }
        if !self.mode.weak() {
            for &(l, t, y) in &self.steps[x] {
                if fits(t) {
                    out.push((Some(Letter::Label(l)), Node::S { x: y, phase: 0, k: 0 }));
                }
            }
            if self.accepts[x].iter().any(|&t| fits(t)) {
                out.push((Some(Letter::Accept), Node::Final));
            }
            return;
        }
        if phase == 0 {
            for &(l, t, y) in &self.steps[x] {
                if fits(t) {
                    if l == 0 {
                        out.push((None, Node::S { x: y, phase: 0, k: 0 }));
                    }
                    out.push((None, Node::S { x: y, phase: 1 + l, k: 0 }));
                }
            }
            if self.accepts[x].iter().any(|&t| fits(t)) {
                out.push((Some(Letter::Accept), Node::Final));
            }
            if k == 0 {
                out.push((None, Node::S { x, phase: 1, k: 0 }));
            }
        } else {
            for &(l, t, y) in &self.steps[x] {
                if l == 0 && fits(t) {
                    out.push((None, Node::S { x: y, phase, k: 0 }));
                }
            }
            if k == 0 {
                out.push((Some(Letter::Label(phase - 1)), Node::S { x, phase: 0, k: 0 }));
            }
        }
    }

    fn closure(&self, mut set: BTreeSet<Node>) -> BTreeSet<Node> {
        let mut stack: Vec<Node> = set.iter().copied().collect();
        let mut buf = Vec::new();
        while let Some(n) = stack.pop() {
            buf.clear();
            self.moves(n, &mut buf);
            for &(l, m) in &buf {
                if l.is_none() && set.insert(m) {
                    stack.push(m);
                }
            }
        }
        set
    }

    fn step(&self, set: &BTreeSet<Node>, letter: Letter) -> BTreeSet<Node> {
        let mut out = BTreeSet::new();
        let mut buf = Vec::new();
        for &n in set {
            buf.clear();
            self.moves(n, &mut buf);
            for &(l, m) in &buf {
                if l == Some(letter) {
                    out.insert(m);
                }
            }
        }
        self.closure(out)
    }

    fn letters(&self) -> Vec<Letter> {
        let mut v = Vec::new();
        if self.mode.timed() {
            v.push(Letter::Tick);
        }
        v.extend((0..self.labels).map(Letter::Label));
        v.push(Letter::Accept);
        v
    }

    /// Shortest word accepted by exactly one of `x`, `y`.
    fn distinguish(&self, x: usize, y: usize) -> Option<TimedWord> {
        let start = |s| self.closure(BTreeSet::from([Node::S { x: s, phase: 0, k: 0 }]));
        let init = (start(x), start(y));
        let letters = self.letters();
        let mut seen: HashMap<(BTreeSet<Node>, BTreeSet<Node>), usize> = HashMap::new();
        let mut parent: Vec<(usize, Letter)> = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(init.clone(), 0);
        parent.push((usize::MAX, Letter::Accept));
        queue.push_back((init, 0usize));
        while let Some(((a, b), id)) = queue.pop_front() {
            for &l in &letters {
                let na = self.step(&a, l);
                let nb = self.step(&b, l);
                if na.is_empty() && nb.is_empty() {
                    continue;
                }
                if na.contains(&Node::Final) != nb.contains(&Node::Final) {
                    let mut path = vec![l];
                    let mut cur = id;
                    while cur != 0 {
                        let (p, pl) = parent[cur];
                        path.push(pl);
                        cur = p;
                    }
                    path.reverse();
                    return Some(self.to_word(&path));
                }
                let key = (na, nb);
                if !seen.contains_key(&key) {
                    let nid = parent.len();
                    parent.push((id, l));
                    seen.insert(key.clone(), nid);
                    queue.push_back((key, nid));
                }
            }
        }
        None
    }

    fn to_word(&self, path: &[Letter]) -> TimedWord {
        let mut letters = Vec::new();
        let mut times = Vec::new();
        let mut ticks = 0u64;
        for l in path {
            match l {
                Letter::Tick => ticks += 1,
                Letter::Label(s) => {
                    letters.push(*s);
                    times.push(ticks);
                    ticks = 0;
                }
                Letter::Accept => times.push(ticks),
            }
        }
        TimedWord { letters, times: self.mode.timed().then_some(times) }
    }

    #[cfg(test)]
    fn accepts(&self, x: usize, w: &TimedWord) -> bool {
        let mut set = self.closure(BTreeSet::from([Node::S { x, phase: 0, k: 0 }]));
        let mut path = Vec::new();
        for (i, &l) in w.letters.iter().enumerate() {
            if let Some(ts) = &w.times {
                path.extend(std::iter::repeat(Letter::Tick).take(ts[i] as usize));
            }
            path.push(Letter::Label(l));
        }
        if let Some(ts) = &w.times {
            path.extend(std::iter::repeat(Letter::Tick).take(*ts.last().unwrap() as usize));
        }
        path.push(Letter::Accept);
        for l in path {
            set = self.step(&set, l);
        }
        set.contains(&Node::Final)
    }
}

/// Whether the Boolean automaton for `mode` accepts `w` from `x` (test hook).
#[cfg(test)]
pub(crate) fn automaton_accepts(sys: &TimedSystem, x: usize, mode: LangMode, w: &TimedWord) -> bool {
    Nfa::new(sys, mode).accepts(x, w)
}
