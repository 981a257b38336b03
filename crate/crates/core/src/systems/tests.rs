use super::*;
use crate::effects::Outcome;

pub(crate) const FIG2: &str = r#"{
  "backend": "nondet",
  "alphabet": ["sigma", "theta"],
  "durations": [0],
  "states": ["s0", "s1", "s2"],
  "steps": [
    {"from": "s0", "label": "tau", "dur": 0, "to": "s0"},
    {"from": "s0", "label": "sigma", "dur": 0, "to": "s1"},
    {"from": "s0", "label": "tau", "dur": 0, "to": "s2"},
    {"from": "s1", "label": "tau", "dur": 0, "to": "s2"},
    {"from": "s2", "label": "theta", "dur": 0, "to": "s2"}
  ]
}"#;

#[test]
fn fig2_loads() {
    let sys = load_system(FIG2).unwrap();
    assert_eq!(sys.len(), 3);
    assert_eq!(sys.backend(), Backend::NonDet);
    assert_eq!(sys.raw_steps().len(), 5);
    assert_eq!(sys.label_index("sigma"), Some(1));
}

#[test]
fn empty_steps_give_bottom() {
    let sys = load_system(r#"{"backend":"nondet","durations":[0,2],"states":["a","b"]}"#).unwrap();
    for t in [0, 2] {
        assert_eq!(sys.step(t).unwrap(), &sys.bottom());
    }
}

#[test]
fn validation_errors() {
    let bad_state = FIG2.replace(r#""to": "s1""#, r#""to": "s9""#);
    let err = load_system(&bad_state).unwrap_err();
    assert!(matches!(&err, Error::Validation { location, .. } if location == "steps[1].to"), "{err}");
    let tau = FIG2.replace(r#"["sigma", "theta"]"#, r#"["sigma", "tau"]"#);
    assert!(matches!(load_system(&tau), Err(Error::Validation { .. })));
    let bad_label = FIG2.replace(r#""label": "theta""#, r#""label": "omega""#);
    assert!(matches!(load_system(&bad_label), Err(Error::Validation { .. })));
    let weighted = r#"{"backend":"weighted","quantale":"unit-min-times","durations":[1],"states":["a"],
        "steps":[{"from":"a","label":"tau","dur":1,"to":"a","weight":"3/2"}]}"#;
    assert!(matches!(load_system(weighted), Err(Error::Validation { .. })));
    let dur = FIG2.replace(r#""dur": 0, "to": "s1""#, r#""dur": 4, "to": "s1""#);
    assert!(matches!(load_system(&dur), Err(Error::Validation { .. })));
    assert!(matches!(load_system("{"), Err(Error::Json(_))));
}

#[test]
fn word_step_composes() {
    let sys = load_system(FIG2).unwrap();
    assert_eq!(sys.word_step(&[]).unwrap(), sys.identity());
    assert_eq!(&sys.word_step(&[0]).unwrap(), sys.step(0).unwrap());
    let two = sys.word_step(&[0, 0]).unwrap();
    assert!(two.matrix_steps().iter().any(|&(x, l, y, _)| (x, l, y) == (0, 1, 2)));
    assert!(matches!(sys.word_step(&[3]), Err(Error::UnknownDuration(3))));
}

#[test]
fn word_step_is_a_morphism() {
    let sys = load_system(r#"{"backend":"weighted","quantale":"nat-inf-max-plus","alphabet":["a"],"durations":[1,2],
        "states":["x","y","z"],
        "accepting":[{"state":"z","dur":1,"weight":2}],
        "steps":[{"from":"x","label":"a","dur":1,"to":"y","weight":3},
                 {"from":"y","label":"tau","dur":2,"to":"z","weight":1},
                 {"from":"z","label":"tau","dur":1,"to":"x","weight":0}]}"#)
    .unwrap();
    let words: [&[u64]; 4] = [&[1], &[1, 2], &[2, 1, 1], &[]];
    for u in words {
        for v in words {
            let uv: Vec<u64> = u.iter().chain(v).copied().collect();
            assert_eq!(sys.word_step(&uv).unwrap(), sys.word_step(u).unwrap().compose(&sys.word_step(v).unwrap()).unwrap());
        }
    }
}

#[test]
fn round_trip() {
    let docs = [
        FIG2.to_string(),
        r#"{"backend":"weighted","quantale":"nat-inf-max-plus","alphabet":["a"],"durations":[1],"states":["x","y"],
            "accepting":[{"state":"y","dur":1,"weight":"inf"}],
            "steps":[{"from":"x","label":"a","dur":1,"to":"y","weight":3}]}"#
            .to_string(),
        r#"{"backend":"convex","alphabet":["a"],"durations":[0,1],"states":["x","y"],
            "accepting":[{"state":"y","dur":0}],
            "convex_steps":[{"from":"x","dur":1,"generators":[
               [{"label":"a","to":"y","weight":"1/2"},{"label":"tau","to":"x","weight":"1/2"}],
               [{"accept":true,"weight":1}]]}]}"#
            .to_string(),
    ];
    for doc in docs {
        let sys = load_system(&doc).unwrap();
        let again = load_system(&sys.to_json()).unwrap();
        assert_eq!(sys, again);
        assert_eq!(sys.to_json(), again.to_json());
    }
}

#[test]
fn convex_accept_entries_become_generators() {
    let sys = load_system(r#"{"backend":"convex","durations":[0],"states":["x"],"accepting":[{"state":"x"}]}"#).unwrap();
    let gens = sys.step(0).unwrap().as_convex().unwrap().generators(0).to_vec();
    assert_eq!(gens, vec![Dist::dirac(Outcome::Accept)]);
    assert!(sys.has_acceptance());
}

#[test]
fn from_endos_round_trip() {
    let sys = load_system(FIG2).unwrap();
    let rebuilt = sys.with_steps(sys.steps().clone()).unwrap();
    assert_eq!(rebuilt, sys);
}

#[test]
fn dot_export() {
    let sys = load_system(FIG2).unwrap();
    let dot = dump_dot(&sys, &DotOptions::default());
    assert_eq!(dot.matches("->").count(), 5);
    assert!(dot.contains("\"sigma,0\""));
    let empty = load_system(r#"{"backend":"nondet","durations":[0],"states":["a","b"]}"#).unwrap();
    let dot = dump_dot(&empty, &DotOptions::default());
    assert_eq!(dot.matches("->").count(), 0);
    assert_eq!(dot.matches("shape=circle").count(), 2);
    let w = load_system(r#"{"backend":"weighted","quantale":"nat-inf-max-plus","alphabet":["σ"],"durations":[1],
        "states":["x","y"],"accepting":[{"state":"y","dur":1,"weight":0}],
        "steps":[{"from":"x","label":"σ","dur":1,"to":"y","weight":3}]}"#)
    .unwrap();
    let dot = dump_dot(&w, &DotOptions::default());
    assert!(dot.contains("\"σ,1 | 3\""), "{dot}");
    assert!(dot.contains("\"y\" [shape=doublecircle]"));
}
