use std::collections::BTreeSet;

use super::*;
use crate::fixtures::TA_ALTERNATING;

fn alternating() -> TimedAutomaton {
    parse_automaton(TA_ALTERNATING).unwrap()
}

fn one_clock(edges: &str) -> TimedAutomaton {
    parse_automaton(&format!(
        r#"{{"alphabet":["a"],"locations":["l","m"],"clocks":["c"],"accepting":["m"],"edges":[{edges}]}}"#
    ))
    .unwrap()
}

#[test]
fn parses_alternating_automaton() {
    let ta = alternating();
    assert_eq!(ta.locations.len(), 2);
    assert_eq!(ta.edges[0].guard, Some(Guard::Le(0, 0)));
    assert_eq!(ta.edges[0].resets, vec![0]);
    assert_eq!(ta.edges[1].guard, Some(Guard::not(Guard::Ge(2, 0))));
    assert_eq!(ta.cap(), 3);
}

#[test]
fn rejects_bad_documents() {
    let bad = r#"{"alphabet":["a"],"locations":["l"],"clocks":["c"],"edges":[{"from":"l","guard":"x <= 1","label":"a","to":"l"}]}"#;
    match parse_automaton(bad) {
        Err(Error::Validation { location, message }) => {
            assert_eq!(location, "edges[0].guard");
            assert!(message.contains("undeclared clock x"), "{message}");
        }
        other => panic!("{other:?}"),
    }
    let neg = bad.replace("x <= 1", "c <= -1");
    assert!(matches!(parse_automaton(&neg), Err(Error::Validation { .. })));
    let unknown = bad.replace("\"to\":\"l\"", "\"to\":\"q\"");
    assert!(matches!(parse_automaton(&unknown), Err(Error::Validation { location, .. }) if location == "edges[0].to"));
}

#[test]
fn empty_edges_compile_to_no_steps() {
    let ta = parse_automaton(r#"{"alphabet":["a"],"locations":["l","m"],"edges":[]}"#).unwrap();
    let sys = compile(&ta, 2, &ta.default_initial(), STATE_BUDGET).unwrap();
    assert_eq!(sys.len(), 2);
    assert!(sys.raw_steps().is_empty());
}

#[test]
fn advance_and_reset() {
    assert_eq!(advance_reset(&[0], 0, &[], 3), vec![0]);
    assert_eq!(advance_reset(&[1], 3, &[], 3), vec![3]);
    assert_eq!(advance_reset(&[1], 1, &[0], 3), vec![0]);
}

#[test]
fn trivially_true_loop_appears_at_every_duration() {
    let ta = one_clock(r#"{"from":"l","guard":"!(c <= 0 & 1 <= c)","label":"a","to":"l"}"#);
    let sys = compile(&ta, 4, &ta.default_initial()[..1], STATE_BUDGET).unwrap();
    // every reachable configuration loops at every duration
    for x in 0..sys.len() {
        let durs: BTreeSet<u64> = sys.raw_steps().iter().filter(|s| s.from == x).map(|s| s.dur).collect();
        assert_eq!(durs, (0..=4).collect());
    }
    assert_eq!(sys.len(), 3);
}

#[test]
fn unsatisfiable_guard_has_no_transitions() {
    let ta = one_clock(r#"{"from":"l","guard":"c <= 0 & 1 <= c","label":"a","to":"m"}"#);
    let sys = compile(&ta, 5, &ta.default_initial(), STATE_BUDGET).unwrap();
    assert!(sys.raw_steps().is_empty());
    // accepting location still accepts
    assert!(sys.has_acceptance());
}

#[test]
fn budget_is_enforced() {
    let ta = one_clock(r#"{"from":"l","guard":"c <= 9","label":"a","to":"l"}"#);
    assert!(matches!(compile(&ta, 10, &ta.default_initial(), 3), Err(Error::Budget { count: 4 })));
}

#[test]
fn initial_parsing() {
    let ta = alternating();
    assert_eq!(ta.parse_initial("l1:c=2").unwrap(), InitialState { location: 1, valuation: vec![2] });
    assert_eq!(ta.parse_initial("l:c=40").unwrap().valuation, vec![3]);
    assert!(ta.parse_initial("nowhere").is_err());
    assert!(ta.parse_initial("l:d=1").is_err());
}

/// Every bounded trace from `l` alternates σ,θ and consecutive delays sum below 2.
#[test]
fn alternating_traces_respect_the_window() {
    let ta = alternating();
    let init = vec![InitialState { location: 0, valuation: vec![0] }];
    let sys = compile(&ta, 3, &init, STATE_BUDGET).unwrap();
    let steps = sys.raw_steps().to_vec();
    let mut traces: Vec<(usize, Vec<(usize, u64)>)> = vec![(0, vec![])];
    let mut checked = 0;
    for _ in 0..6 {
        let mut next = Vec::new();
        for (at, trace) in &traces {
            for s in steps.iter().filter(|s| s.from == *at) {
                let mut t = trace.clone();
                t.push((s.label, s.dur));
                next.push((s.to, t));
            }
        }
        for (_, t) in &next {
            for (i, (lab, _)) in t.iter().enumerate() {
                assert_eq!(sys.label_name(*lab), if i % 2 == 0 { "sigma" } else { "theta" });
            }
            for w in t.windows(2) {
                assert!(w[0].1 + w[1].1 < 2, "{t:?}");
            }
            checked += 1;
        }
        traces = next;
    }
    assert!(checked > 0);
}

/// Uncapped semantics, straight from the definition.
fn uncapped_successors(ta: &TimedAutomaton, l: usize, v: &[u64], t: u64) -> Vec<(usize, usize, Vec<u64>)> {
    let waited: Vec<u64> = v.iter().map(|x| x + t).collect();
    ta.edges
        .iter()
        .filter(|e| e.from == l && e.guard.as_ref().is_none_or(|g| eval_guard(g, &waited)))
        .map(|e| {
            let mut w = waited.clone();
            for &c in &e.resets {
                w[c] = 0;
            }
            (e.label, e.to, w)
        })
        .collect()
}

fn two_clock_automaton() -> TimedAutomaton {
    parse_automaton(
        r#"{"alphabet":["a","b"],"locations":["p","q","r"],"clocks":["c","d"],"accepting":["r"],"edges":[
            {"from":"p","guard":"c <= 1 & !(d < 1)","resets":["c"],"label":"a","to":"q"},
            {"from":"q","guard":"2 <= d","resets":["d"],"label":"b","to":"p"},
            {"from":"q","guard":"c > 0 & d <= 2","resets":[],"label":"tau","to":"r"},
            {"from":"r","label":"a","to":"r"},
            {"from":"p","guard":"!(c <= 2)","resets":["c","d"],"label":"b","to":"r"}
        ]}"#,
    )
    .unwrap()
}

#[test]
fn capping_preserves_guards() {
    for ta in [alternating(), two_clock_automaton()] {
        let cap = ta.cap();
        let n = ta.clocks.len();
        let guards: Vec<&Guard> = ta.edges.iter().filter_map(|e| e.guard.as_ref()).collect();
        let hi = cap + 4;
        let mut v = vec![0u64; n];
        loop {
            let capped: Vec<u64> = v.iter().map(|&x| x.min(cap)).collect();
            for g in &guards {
                assert_eq!(eval_guard(g, &v), eval_guard(g, &capped), "{v:?}");
            }
            let mut i = 0;
            while i < n && v[i] == hi {
                v[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            v[i] += 1;
        }
    }
}

/// Compiled steps coincide with a direct walk of the uncapped semantics, once targets are
/// capped for comparison.
#[test]
fn transition_count_matches_direct_semantics() {
    for (ta, t_max) in [(alternating(), 3), (two_clock_automaton(), 4)] {
        let sys = compile(&ta, t_max, &ta.default_initial(), STATE_BUDGET).unwrap();
        let cap = ta.cap();
        let mut expected = BTreeSet::new();
        for l in 0..ta.locations.len() {
            // every valuation in the capped grid, reachable or not, restricted below to compiled states
            let n = ta.clocks.len();
            let mut v = vec![0u64; n];
            loop {
                let name = ta.state_name(l, &v);
                if sys.state_index(&name).is_some() {
                    for t in 0..=t_max {
                        for (label, to, w) in uncapped_successors(&ta, l, &v, t) {
                            let w: Vec<u64> = w.iter().map(|&x| x.min(cap)).collect();
                            expected.insert((name.clone(), label, t, ta.state_name(to, &w)));
                        }
                    }
                }
                let mut i = 0;
                while i < n && v[i] == cap {
                    v[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
                v[i] += 1;
            }
        }
        let got: BTreeSet<(String, usize, u64, String)> = sys
            .raw_steps()
            .iter()
            .map(|s| (sys.states()[s.from].clone(), s.label, s.dur, sys.states()[s.to].clone()))
            .collect();
        assert_eq!(got.len(), sys.raw_steps().len());
        assert_eq!(got, expected);
    }
}

#[test]
fn compile_is_deterministic() {
    let ta = two_clock_automaton();
    let a = compile(&ta, 3, &ta.default_initial(), STATE_BUDGET).unwrap().to_json();
    let b = compile(&two_clock_automaton(), 3, &ta.default_initial(), STATE_BUDGET).unwrap().to_json();
    assert_eq!(a, b);
}
