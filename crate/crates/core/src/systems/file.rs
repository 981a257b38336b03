use serde::{Deserialize, Serialize};

/// A weight literal: a JSON number or a string such as `"1/2"` or `"inf"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lit {
    Int(u64),
    Bool(bool),
    Str(String),
}

impl Lit {
    pub fn text(&self) -> String {
        match self {
            Lit::Int(n) => n.to_string(),
            Lit::Bool(b) => b.to_string(),
            Lit::Str(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepEntry {
    pub from: String,
    pub label: String,
    pub dur: u64,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Lit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptEntry {
    pub state: String,
    #[serde(default)]
    pub dur: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Lit>,
}

/// One support point of a convex generator: either `{label, to, weight}` or `{accept: true, weight}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub accept: bool,
    pub weight: Lit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexEntry {
    pub from: String,
    pub dur: u64,
    pub generators: Vec<Vec<PointEntry>>,
}

/// The JSON document describing a timed system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantale: Option<String>,
    #[serde(default)]
    pub alphabet: Vec<String>,
    pub durations: Vec<u64>,
    pub states: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub accepting: Vec<AcceptEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convex_steps: Vec<ConvexEntry>,
}
