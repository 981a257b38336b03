//! Small documents used by tests, examples and the demo page.

/// Three states; `s0 τ→ s0`, `s0 σ→ s1`, `s0 τ→ s2`, `s1 τ→ s2`, `s2 θ→ s2`, all at duration 0.
pub const FIG2: &str = r#"{
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

/// The weak transitions of [`FIG2`], reflexive τ-loops included.
pub const FIG2_SATURATED: &str = r#"{
  "backend": "nondet",
  "alphabet": ["sigma", "theta"],
  "durations": [0],
  "states": ["s0", "s1", "s2"],
  "steps": [
    {"from": "s0", "label": "tau", "dur": 0, "to": "s0"},
    {"from": "s0", "label": "sigma", "dur": 0, "to": "s1"},
    {"from": "s0", "label": "tau", "dur": 0, "to": "s2"},
    {"from": "s0", "label": "sigma", "dur": 0, "to": "s2"},
    {"from": "s0", "label": "theta", "dur": 0, "to": "s2"},
    {"from": "s1", "label": "tau", "dur": 0, "to": "s1"},
    {"from": "s1", "label": "tau", "dur": 0, "to": "s2"},
    {"from": "s1", "label": "theta", "dur": 0, "to": "s2"},
    {"from": "s2", "label": "tau", "dur": 0, "to": "s2"},
    {"from": "s2", "label": "theta", "dur": 0, "to": "s2"}
  ]
}"#;

/// `x τ,1→ y`, `y σ,0→ y`.
pub const WT1: &str = r#"{
  "backend": "nondet",
  "alphabet": ["sigma"],
  "durations": [0, 1],
  "states": ["x", "y"],
  "steps": [
    {"from": "x", "label": "tau", "dur": 1, "to": "y"},
    {"from": "y", "label": "sigma", "dur": 0, "to": "y"}
  ]
}"#;

/// `x τ,0→ x1 σ,0→ z` against `y σ,0→ z2`; `z`, `z2` are dead.
pub const WT2: &str = r#"{
  "backend": "nondet",
  "alphabet": ["sigma"],
  "durations": [0],
  "states": ["x", "x1", "z", "y", "z2"],
  "steps": [
    {"from": "x", "label": "tau", "dur": 0, "to": "x1"},
    {"from": "x1", "label": "sigma", "dur": 0, "to": "z"},
    {"from": "y", "label": "sigma", "dur": 0, "to": "z2"}
  ]
}"#;

/// `x σ,1→ y`, `y` accepts at time 0; `w` has no acceptance.
pub const ACC1: &str = r#"{
  "backend": "nondet",
  "alphabet": ["sigma"],
  "durations": [0, 1],
  "states": ["x", "y", "w"],
  "accepting": [{"state": "y", "dur": 0}],
  "steps": [
    {"from": "x", "label": "sigma", "dur": 1, "to": "y"}
  ]
}"#;

/// `x τ,0→ y`, `y` accepts at time 0.
pub const ACC2: &str = r#"{
  "backend": "nondet",
  "alphabet": [],
  "durations": [0],
  "states": ["x", "y"],
  "accepting": [{"state": "y", "dur": 0}],
  "steps": [
    {"from": "x", "label": "tau", "dur": 0, "to": "y"}
  ]
}"#;

/// One clock `c`; `l -(c≤0, {c}, σ)→ l1` and `l1 -(c<2, ∅, θ)→ l`.
pub const TA_ALTERNATING: &str = r#"{
  "alphabet": ["sigma", "theta"],
  "locations": ["l", "l1"],
  "clocks": ["c"],
  "accepting": [],
  "edges": [
    {"from": "l", "guard": "c <= 0", "resets": ["c"], "label": "sigma", "to": "l1"},
    {"from": "l1", "guard": "!(2 <= c)", "resets": [], "label": "theta", "to": "l"}
  ]
}"#;

/// `[[1/2, 1/2], [0, 1]]`.
pub const CHAIN_HALF: &str = r#"{
  "states": ["a", "b"],
  "rows": [["1/2", "1/2"], ["0", "1"]]
}"#;

/// Start state splitting 1/3 and 2/3 into two absorbing states.
pub const CHAIN_SPLIT: &str = r#"{
  "states": ["start", "left", "right"],
  "rows": [["0", "1/3", "2/3"], ["0", "1", "0"], ["0", "0", "1"]]
}"#;
