//! Finite timed systems: a duration-indexed family of effect endomorphisms, with JSON I/O.

mod dot;
mod file;

pub use dot::{dump_dot, endo_dot, family_dot, DotOptions};
pub use file::{AcceptEntry, ConvexEntry, Lit, PointEntry, StepEntry, SystemFile};

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::algebra::{StarQuantale, Weight, WeightDomain, MAX_LABELS};
use crate::effects::{Backend, ConvexEndo, Dist, EffectEndo, Outcome};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Reserved name of the silent label.
pub const TAU: &str = "tau";

/// A raw step `from -(label, dur)→ to` as declared; NonDet weights are `Bool(true)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawStep {
    pub from: usize,
    pub label: usize,
    pub dur: u64,
    pub to: usize,
    pub weight: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawAccept {
    pub state: usize,
    pub dur: u64,
    pub weight: Weight,
}

/// A finite timed transition system over one backend.
///
/// Label 0 is τ; label `i + 1` is `alphabet[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedSystem {
    states: Vec<String>,
    alphabet: Vec<String>,
    durations: Vec<u64>,
    backend: Backend,
    steps: BTreeMap<u64, EffectEndo>,
    raw_steps: Vec<RawStep>,
    raw_accepts: Vec<RawAccept>,
    raw_convex: BTreeMap<(usize, u64), Vec<Dist>>,
}

impl TimedSystem {
    pub fn new(states: Vec<String>, alphabet: Vec<String>, durations: Vec<u64>, backend: Backend) -> Result<Self> {
        let mut durations = durations;
        durations.sort_unstable();
        durations.dedup();
        if durations.is_empty() {
            return Err(Error::validation("durations", "duration set must be non-empty"));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::validation(format!("states[{i}]"), format!("duplicate state {s}")));
            }
        }
        for (i, a) in alphabet.iter().enumerate() {
            if a == TAU {
                return Err(Error::validation(format!("alphabet[{i}]"), "tau is reserved and may not be listed"));
            }
            if alphabet[..i].contains(a) {
                return Err(Error::validation(format!("alphabet[{i}]"), format!("duplicate label {a}")));
            }
        }
        if alphabet.len() + 1 > MAX_LABELS {
            return Err(Error::validation("alphabet", format!("at most {} labels supported", MAX_LABELS - 1)));
        }
        let labels = alphabet.len() + 1;
        let steps = durations.iter().map(|&t| (t, EffectEndo::bottom(backend, states.len(), labels))).collect();
        Ok(TimedSystem {
            states,
            alphabet,
            durations,
            backend,
            steps,
            raw_steps: Vec::new(),
            raw_accepts: Vec::new(),
            raw_convex: BTreeMap::new(),
        })
    }

    /// Builds a system whose step at each key is the given endo.
    pub fn from_endos(
        states: Vec<String>,
        alphabet: Vec<String>,
        backend: Backend,
        endos: BTreeMap<u64, EffectEndo>,
    ) -> Result<Self> {
        let mut sys = TimedSystem::new(states, alphabet, endos.keys().copied().collect(), backend)?;
        for (t, e) in endos {
            if e.backend() != backend || e.dim() != sys.states.len() {
                return Err(Error::BackendMismatch(format!("step {t} does not match the system")));
            }
            match &e {
                EffectEndo::Convex(c) => {
                    for x in 0..c.dim() {
                        for g in c.generators(x) {
                            sys.add_generator(x, t, g.clone())?;
                        }
                    }
                }
                _ => {
                    for (x, l, y, w) in e.matrix_steps() {
                        sys.add_step(x, l, t, y, w)?;
                    }
                    for x in 0..e.dim() {
                        let w = e.accept_weight(x).expect("matrix backend");
                        if !backend_domain(backend).is_bottom(&w) {
                            sys.add_accept(x, t, w)?;
                        }
                    }
                }
            }
        }
        Ok(sys)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    /// Number of labels including τ.
    pub fn labels(&self) -> usize {
        self.alphabet.len() + 1
    }

    pub fn label_name(&self, l: usize) -> &str {
        if l == 0 {
            TAU
        } else {
            &self.alphabet[l - 1]
        }
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        if name == TAU {
            Some(0)
        } else {
            self.alphabet.iter().position(|a| a == name).map(|i| i + 1)
        }
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn durations(&self) -> &[u64] {
        &self.durations
    }

    pub fn max_duration(&self) -> u64 {
        *self.durations.last().expect("non-empty")
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn step(&self, t: u64) -> Result<&EffectEndo> {
        self.steps.get(&t).ok_or(Error::UnknownDuration(t))
    }

    pub fn steps(&self) -> &BTreeMap<u64, EffectEndo> {
        &self.steps
    }

    pub fn identity(&self) -> EffectEndo {
        EffectEndo::identity(self.backend, self.len(), self.labels())
    }

    pub fn bottom(&self) -> EffectEndo {
        EffectEndo::bottom(self.backend, self.len(), self.labels())
    }

    pub fn raw_steps(&self) -> &[RawStep] {
        &self.raw_steps
    }

    pub fn raw_accepts(&self) -> &[RawAccept] {
        &self.raw_accepts
    }

    /// Declared convex generators per `(state, duration)`.
    pub fn raw_convex(&self) -> &BTreeMap<(usize, u64), Vec<Dist>> {
        &self.raw_convex
    }

    pub fn has_acceptance(&self) -> bool {
        !self.raw_accepts.is_empty()
            || self.raw_convex.values().flatten().any(|d| d.iter().any(|(o, _)| *o == Outcome::Accept))
    }

    fn check_index(&self, what: &str, i: usize, n: usize) -> Result<()> {
        if i >= n {
            return Err(Error::validation(what, format!("index {i} out of range")));
        }
        Ok(())
    }

    /// Adds (joins) a matrix-backend step.
    pub fn add_step(&mut self, from: usize, label: usize, dur: u64, to: usize, weight: Weight) -> Result<()> {
        self.check_index("step source", from, self.len())?;
        self.check_index("step target", to, self.len())?;
        self.check_index("step label", label, self.labels())?;
        let endo = self.steps.get_mut(&dur).ok_or(Error::UnknownDuration(dur))?;
        match endo {
            EffectEndo::NonDet(m) => m.add_step(from, label, to, true),
            EffectEndo::Weighted(m) => {
                check_weight(m.algebra().inner, &weight)?;
                m.add_step(from, label, to, weight.clone())
            }
            EffectEndo::Convex(_) => return Err(Error::BackendMismatch("convex systems take generators".into())),
        }
        let weight = if self.backend == Backend::NonDet { Weight::Bool(true) } else { weight };
        let dom = backend_domain(self.backend);
        match self.raw_steps.iter_mut().find(|s| (s.from, s.label, s.dur, s.to) == (from, label, dur, to)) {
            Some(s) => s.weight = dom.join(&s.weight, &weight),
            None => {
                self.raw_steps.push(RawStep { from, label, dur, to, weight });
                self.raw_steps.sort_by_key(|s| (s.dur, s.from, s.label, s.to));
            }
        }
        Ok(())
    }

    pub fn add_accept(&mut self, state: usize, dur: u64, weight: Weight) -> Result<()> {
        self.check_index("accepting state", state, self.len())?;
        if self.backend == Backend::Convex {
            return self.add_generator(state, dur, Dist::dirac(Outcome::Accept));
        }
        let endo = self.steps.get_mut(&dur).ok_or(Error::UnknownDuration(dur))?;
        match endo {
            EffectEndo::NonDet(m) => m.add_accept(state, true),
            EffectEndo::Weighted(m) => {
                check_weight(m.algebra().inner, &weight)?;
                m.add_accept(state, weight.clone())
            }
            EffectEndo::Convex(_) => unreachable!("handled above"),
        }
        let weight = if self.backend == Backend::NonDet { Weight::Bool(true) } else { weight };
        let dom = backend_domain(self.backend);
        match self.raw_accepts.iter_mut().find(|a| (a.state, a.dur) == (state, dur)) {
            Some(a) => a.weight = dom.join(&a.weight, &weight),
            None => {
                self.raw_accepts.push(RawAccept { state, dur, weight });
                self.raw_accepts.sort_by_key(|a| (a.dur, a.state));
            }
        }
        Ok(())
    }

    /// Adds a convex generator at `(from, dur)`.
    pub fn add_generator(&mut self, from: usize, dur: u64, gen: Dist) -> Result<()> {
        self.check_index("generator source", from, self.len())?;
        if !gen.is_sub_distribution() {
            return Err(Error::validation("generator", format!("{gen} is not a sub-distribution")));
        }
        for (o, _) in gen.iter() {
            if let Outcome::Step { label, state } = o {
                self.check_index("generator label", *label, self.labels())?;
                self.check_index("generator target", *state, self.len())?;
            }
        }
        let endo = self.steps.get_mut(&dur).ok_or(Error::UnknownDuration(dur))?;
        let EffectEndo::Convex(c) = endo else {
            return Err(Error::BackendMismatch("generators need the convex backend".into()));
        };
        c.add_generator(from, gen.clone());
        let list = self.raw_convex.entry((from, dur)).or_default();
        if !list.contains(&gen) {
            list.push(gen);
            list.sort();
        }
        Ok(())
    }

    /// π_{t₁}∘…∘π_{t_k}; the empty word gives the identity.
    pub fn word_step(&self, word: &[u64]) -> Result<EffectEndo> {
        let mut acc = self.identity();
        for &t in word {
            acc = acc.compose(self.step(t)?)?;
        }
        Ok(acc)
    }

    /// A copy with the same states, labels and backend but a different step family.
    pub fn with_steps(&self, endos: BTreeMap<u64, EffectEndo>) -> Result<Self> {
        TimedSystem::from_endos(self.states.clone(), self.alphabet.clone(), self.backend, endos)
    }

    pub fn to_file(&self) -> SystemFile {
        let (backend, quantale) = match self.backend {
            Backend::NonDet => ("nondet".to_string(), None),
            Backend::Weighted(d) => ("weighted".to_string(), Some(d.key().to_string())),
            Backend::Convex => ("convex".to_string(), None),
        };
        let weight_lit = |w: &Weight| match (self.backend, w) {
            (Backend::Weighted(d), w) => Some(Lit::Str(d.format_weight(w))),
            _ => None,
        };
        let steps = self
            .raw_steps
            .iter()
            .map(|s| StepEntry {
                from: self.states[s.from].clone(),
                label: self.label_name(s.label).to_string(),
                dur: s.dur,
                to: self.states[s.to].clone(),
                weight: weight_lit(&s.weight),
            })
            .collect();
        let accepting = self
            .raw_accepts
            .iter()
            .map(|a| AcceptEntry { state: self.states[a.state].clone(), dur: a.dur, weight: weight_lit(&a.weight) })
            .collect();
        let mut convex: Vec<((u64, usize), ConvexEntry)> = self
            .raw_convex
            .iter()
            .map(|(&(from, dur), gens)| {
                let generators = gens
                    .iter()
                    .map(|g| {
                        g.iter()
                            .map(|(o, w)| match o {
                                Outcome::Step { label, state } => PointEntry {
                                    label: Some(self.label_name(*label).to_string()),
                                    to: Some(self.states[*state].clone()),
                                    accept: false,
                                    weight: Lit::Str(format_rational(w)),
                                },
                                Outcome::Accept => PointEntry {
                                    label: None,
                                    to: None,
                                    accept: true,
                                    weight: Lit::Str(format_rational(w)),
                                },
                            })
                            .collect()
                    })
                    .collect();
                ((dur, from), ConvexEntry { from: self.states[from].clone(), dur, generators })
            })
            .collect();
        convex.sort_by_key(|(k, _)| *k);
        SystemFile {
            backend,
            quantale,
            alphabet: self.alphabet.clone(),
            durations: self.durations.clone(),
            states: self.states.clone(),
            accepting,
            steps,
            convex_steps: convex.into_iter().map(|(_, e)| e).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("system files serialize")
    }
}

fn backend_domain(b: Backend) -> WeightDomain {
    match b {
        Backend::Weighted(d) => d,
        _ => WeightDomain::Bool,
    }
}

fn check_weight(d: WeightDomain, w: &Weight) -> Result<()> {
    let ok = matches!(
        (d, w),
        (WeightDomain::Bool, Weight::Bool(_))
            | (WeightDomain::NatInfMaxPlus, Weight::Cost(_))
            | (WeightDomain::UnitMinTimes, Weight::Likelihood(_))
    );
    if ok {
        Ok(())
    } else {
        Err(Error::validation("weight", format!("{w} is not in {}", d.key())))
    }
}

/// Parses and validates a system document.
pub fn load_system(doc: &str) -> Result<TimedSystem> {
    let file: SystemFile = serde_json::from_str(doc)?;
    from_file(&file)
}

pub fn from_file(file: &SystemFile) -> Result<TimedSystem> {
    let backend = match (file.backend.as_str(), &file.quantale) {
        ("nondet", None) => Backend::NonDet,
        ("nondet", Some(_)) => return Err(Error::validation("quantale", "only weighted systems name a quantale")),
        ("weighted", Some(q)) => Backend::Weighted(
            WeightDomain::from_key(q).ok_or_else(|| Error::validation("quantale", format!("unknown quantale {q}")))?,
        ),
        ("weighted", None) => return Err(Error::validation("quantale", "weighted systems need a quantale")),
        ("convex", _) => Backend::Convex,
        (other, _) => return Err(Error::validation("backend", format!("unknown backend {other}"))),
    };
    let mut sys = TimedSystem::new(file.states.clone(), file.alphabet.clone(), file.durations.clone(), backend)?;
    let state = |loc: &str, name: &str, sys: &TimedSystem| {
        sys.state_index(name).ok_or_else(|| Error::validation(loc, format!("undeclared state {name}")))
    };
    let label = |loc: &str, name: &str, sys: &TimedSystem| {
        sys.label_index(name).ok_or_else(|| Error::validation(loc, format!("undeclared label {name}")))
    };
    let dur = |loc: &str, t: u64, sys: &TimedSystem| {
        if sys.durations.contains(&t) {
            Ok(t)
        } else {
            Err(Error::validation(loc, format!("duration {t} not declared")))
        }
    };
    let weight = |loc: &str, w: &Option<Lit>| -> Result<Weight> {
        match (backend, w) {
            (Backend::NonDet, None) => Ok(Weight::Bool(true)),
            (Backend::NonDet, Some(Lit::Bool(true))) => Ok(Weight::Bool(true)),
            (Backend::NonDet, Some(_)) => Err(Error::validation(loc, "nondet steps carry no weight")),
            (Backend::Weighted(d), None) => Ok(d.one()),
            (Backend::Weighted(d), Some(lit)) => d
                .parse_weight(&lit.text())
                .ok_or_else(|| Error::validation(loc, format!("weight {} outside {}", lit.text(), d.key()))),
            (Backend::Convex, _) => Ok(Weight::Bool(true)),
        }
    };
    for (i, s) in file.steps.iter().enumerate() {
        let loc = format!("steps[{i}]");
        if backend == Backend::Convex {
            return Err(Error::validation(loc, "convex systems use convex_steps"));
        }
        let from = state(&format!("{loc}.from"), &s.from, &sys)?;
        let to = state(&format!("{loc}.to"), &s.to, &sys)?;
        let l = label(&format!("{loc}.label"), &s.label, &sys)?;
        let t = dur(&format!("{loc}.dur"), s.dur, &sys)?;
        let w = weight(&format!("{loc}.weight"), &s.weight)?;
        sys.add_step(from, l, t, to, w)?;
    }
    for (i, a) in file.accepting.iter().enumerate() {
        let loc = format!("accepting[{i}]");
        let x = state(&format!("{loc}.state"), &a.state, &sys)?;
        let t = dur(&format!("{loc}.dur"), a.dur, &sys)?;
        if backend == Backend::Convex {
            let mass = match &a.weight {
                None => Rational::one(),
                Some(lit) => parse_rational(&lit.text())
                    .filter(|r| !r.is_negative() && *r <= Rational::one())
                    .ok_or_else(|| Error::validation(&loc, "acceptance mass must be in [0,1]"))?,
            };
            sys.add_generator(x, t, Dist::from_pairs([(Outcome::Accept, mass)]))?;
        } else {
            let w = weight(&format!("{loc}.weight"), &a.weight)?;
            sys.add_accept(x, t, w)?;
        }
    }
    if !file.convex_steps.is_empty() && backend != Backend::Convex {
        return Err(Error::validation("convex_steps", "only convex systems take generators"));
    }
    for (i, c) in file.convex_steps.iter().enumerate() {
        let loc = format!("convex_steps[{i}]");
        let from = state(&format!("{loc}.from"), &c.from, &sys)?;
        let t = dur(&format!("{loc}.dur"), c.dur, &sys)?;
        for (g, points) in c.generators.iter().enumerate() {
            let gloc = format!("{loc}.generators[{g}]");
            let mut d = Dist::zero();
            for (k, p) in points.iter().enumerate() {
                let ploc = format!("{gloc}[{k}]");
                let w = parse_rational(&p.weight.text())
                    .filter(|r| !r.is_negative())
                    .ok_or_else(|| Error::validation(&ploc, format!("bad weight {}", p.weight.text())))?;
                let o = if p.accept {
                    if p.label.is_some() || p.to.is_some() {
                        return Err(Error::validation(&ploc, "accept points take no label or target"));
                    }
                    Outcome::Accept
                } else {
                    let (Some(l), Some(to)) = (&p.label, &p.to) else {
                        return Err(Error::validation(&ploc, "points need label and to, or accept"));
                    };
                    Outcome::Step { label: label(&ploc, l, &sys)?, state: state(&ploc, to, &sys)? }
                };
                d.add(o, &w);
            }
            if d.mass() > Rational::one() {
                return Err(Error::validation(&gloc, "generator mass exceeds 1"));
            }
            sys.add_generator(from, t, d)?;
        }
    }
    Ok(sys)
}

/// Convenience constructor for a convex endo straight from generator rows.
pub fn convex_endo(rows: Vec<Vec<Dist>>) -> EffectEndo {
    EffectEndo::Convex(ConvexEndo::from_generators(rows))
}

#[cfg(test)]
mod tests;
