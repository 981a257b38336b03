//! Timed automata under discrete time, compiled to finite timed systems by capping clocks.

mod guard;

pub use guard::{eval_guard, parse_guard, Guard};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::algebra::Weight;
use crate::effects::Backend;
use crate::error::{Error, Result};
use crate::systems::{TimedSystem, TAU};

/// Default ceiling on compiled states.
pub const STATE_BUDGET: usize = 100_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub from: String,
    /// Absent means always enabled.
    #[serde(default)]
    pub guard: Option<String>,
    #[serde(default)]
    pub resets: Vec<String>,
    pub label: String,
    pub to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonFile {
    pub alphabet: Vec<String>,
    pub locations: Vec<String>,
    #[serde(default)]
    pub clocks: Vec<String>,
    #[serde(default)]
    pub accepting: Vec<String>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub guard: Option<Guard>,
    pub resets: Vec<usize>,
    /// 0 is τ, `i + 1` is `alphabet[i]`.
    pub label: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedAutomaton {
    pub alphabet: Vec<String>,
    pub locations: Vec<String>,
    pub clocks: Vec<String>,
    pub accepting: Vec<bool>,
    pub edges: Vec<Edge>,
}

/// Clock values, each at most `cap`.
pub type Valuation = Vec<u64>;

/// A start configuration for compilation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialState {
    pub location: usize,
    pub valuation: Valuation,
}

fn index_of(names: &[String], name: &str, location: impl FnOnce() -> String, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::validation(location(), format!("unknown {what} {name}")))
}

fn unique(names: &[String], field: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (i, n) in names.iter().enumerate() {
        if !seen.insert(n) {
            return Err(Error::validation(format!("{field}[{i}]"), format!("duplicate name {n}")));
        }
    }
    Ok(())
}

pub fn parse_automaton(doc: &str) -> Result<TimedAutomaton> {
    let file: AutomatonFile = serde_json::from_str(doc)?;
    automaton_from_file(&file)
}

pub fn automaton_from_file(file: &AutomatonFile) -> Result<TimedAutomaton> {
    unique(&file.alphabet, "alphabet")?;
    unique(&file.locations, "locations")?;
    unique(&file.clocks, "clocks")?;
    if file.alphabet.iter().any(|a| a == TAU) {
        return Err(Error::validation("alphabet", format!("{TAU} is reserved for silent edges")));
    }
    if file.locations.is_empty() {
        return Err(Error::validation("locations", "at least one location is required"));
    }
    let mut accepting = vec![false; file.locations.len()];
    for (i, a) in file.accepting.iter().enumerate() {
        accepting[index_of(&file.locations, a, || format!("accepting[{i}]"), "location")?] = true;
    }
    let mut edges = Vec::with_capacity(file.edges.len());
    for (i, e) in file.edges.iter().enumerate() {
        let at = |f: &str| format!("edges[{i}].{f}");
        let from = index_of(&file.locations, &e.from, || at("from"), "location")?;
        let to = index_of(&file.locations, &e.to, || at("to"), "location")?;
        let label = if e.label == TAU { 0 } else { index_of(&file.alphabet, &e.label, || at("label"), "label")? + 1 };
        let guard = match &e.guard {
            None => None,
            Some(src) => Some(parse_guard(src, &file.clocks).map_err(|err| match err {
                Error::Parse { pos, message } => Error::validation(at("guard"), format!("column {pos}: {message}")),
                other => other,
            })?),
        };
        let mut resets = Vec::new();
        for (j, r) in e.resets.iter().enumerate() {
            resets.push(index_of(&file.clocks, r, || format!("edges[{i}].resets[{j}]"), "clock")?);
        }
        resets.sort_unstable();
        resets.dedup();
        edges.push(Edge { from, guard, resets, label, to });
    }
    Ok(TimedAutomaton {
        alphabet: file.alphabet.clone(),
        locations: file.locations.clone(),
        clocks: file.clocks.clone(),
        accepting,
        edges,
    })
}

impl TimedAutomaton {
    /// One above the largest guard constant; clocks saturate here.
    pub fn cap(&self) -> u64 {
        self.edges.iter().filter_map(|e| e.guard.as_ref()).map(Guard::max_constant).max().unwrap_or(0) + 1
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    /// Every location with the all-zero valuation.
    pub fn default_initial(&self) -> Vec<InitialState> {
        (0..self.locations.len())
            .map(|location| InitialState { location, valuation: vec![0; self.clocks.len()] })
            .collect()
    }

    /// Parses `l` or `l:c=1,d=0`; unnamed clocks start at zero.
    pub fn parse_initial(&self, spec: &str) -> Result<InitialState> {
        let (loc, vals) = spec.split_once(':').unwrap_or((spec, ""));
        let location =
            self.location_index(loc).ok_or_else(|| Error::validation("initial", format!("unknown location {loc}")))?;
        let mut valuation = vec![0; self.clocks.len()];
        for part in vals.split(',').filter(|p| !p.trim().is_empty()) {
            let (c, v) = part
                .split_once('=')
                .ok_or_else(|| Error::validation("initial", format!("expected clock=value, got {part}")))?;
            let c = index_of(&self.clocks, c.trim(), || "initial".into(), "clock")?;
            valuation[c] = v
                .trim()
                .parse()
                .map_err(|_| Error::validation("initial", format!("bad clock value {v}")))?;
        }
        let cap = self.cap();
        for v in &mut valuation {
            *v = (*v).min(cap);
        }
        Ok(InitialState { location, valuation })
    }

    /// The configuration name, e.g. `l(c=0)`; bare location names without clocks.
    pub fn state_name(&self, location: usize, v: &[u64]) -> String {
        if self.clocks.is_empty() {
            return self.locations[location].clone();
        }
        let vals: Vec<String> = self.clocks.iter().zip(v).map(|(c, x)| format!("{c}={x}")).collect();
        format!("{}({})", self.locations[location], vals.join(","))
    }

    /// Successors of `(l, v)` after waiting `t`: `(label, l', v')` per enabled edge.
    pub fn successors(&self, location: usize, v: &[u64], t: u64) -> Vec<(usize, usize, Valuation)> {
        let cap = self.cap();
        let waited = advance_reset(v, t, &[], cap);
        self.edges
            .iter()
            .filter(|e| e.from == location && e.guard.as_ref().is_none_or(|g| eval_guard(g, &waited)))
            .map(|e| (e.label, e.to, advance_reset(&waited, 0, &e.resets, cap)))
            .collect()
    }
}

/// `[resets←0](v + t)` with every clock capped.
pub fn advance_reset(v: &[u64], t: u64, resets: &[usize], cap: u64) -> Valuation {
    let mut out: Valuation = v.iter().map(|&x| x.saturating_add(t).min(cap)).collect();
    for &c in resets {
        out[c] = 0;
    }
    out
}

/// Reachable configurations from `initial` over durations `0..=t_max`, as a nondeterministic
/// system. Accepting locations accept at duration 0.
pub fn compile(ta: &TimedAutomaton, t_max: u64, initial: &[InitialState], budget: usize) -> Result<TimedSystem> {
    let mut ids: BTreeMap<(usize, Valuation), usize> = BTreeMap::new();
    let mut order: Vec<(usize, Valuation)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut transitions = Vec::new();
    let mut visit = |cfg: (usize, Valuation), order: &mut Vec<_>, queue: &mut VecDeque<usize>| -> Result<usize> {
        if let Some(&i) = ids.get(&cfg) {
            return Ok(i);
        }
        let i = order.len();
        if i >= budget {
            return Err(Error::Budget { count: i + 1 });
        }
        ids.insert(cfg.clone(), i);
        order.push(cfg);
        queue.push_back(i);
        Ok(i)
    };
    for s in initial {
        if s.location >= ta.locations.len() || s.valuation.len() != ta.clocks.len() {
            return Err(Error::validation("initial", "initial state does not fit the automaton"));
        }
        visit((s.location, s.valuation.clone()), &mut order, &mut queue)?;
    }
    while let Some(i) = queue.pop_front() {
        let (l, v) = order[i].clone();
        for t in 0..=t_max {
            for (label, to, w) in ta.successors(l, &v, t) {
                let j = visit((to, w), &mut order, &mut queue)?;
                transitions.push((i, label, t, j));
            }
        }
    }
    let names: Vec<String> = order.iter().map(|(l, v)| ta.state_name(*l, v)).collect();
    let mut sys = TimedSystem::new(names, ta.alphabet.clone(), (0..=t_max).collect(), Backend::NonDet)?;
    for (i, label, t, j) in transitions {
        sys.add_step(i, label, t, j, Weight::Bool(true))?;
    }
    for (i, (l, _)) in order.iter().enumerate() {
        if ta.accepting[*l] {
            sys.add_accept(i, 0, Weight::Bool(true))?;
        }
    }
    Ok(sys)
}

#[cfg(test)]
mod tests;
