use std::fmt::Write;

use super::{TimedSystem, TAU};
use crate::algebra::{StarQuantale, WeightDomain};
use crate::effects::{EffectEndo, Outcome};
use crate::rational::format_rational;

#[derive(Clone, Debug, Default)]
pub struct DotOptions {
    /// Graph name; defaults to `system`.
    pub name: Option<String>,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT for a declared system; edges read `σ,t` (plus ` | w` when weighted).
pub fn dump_dot(sys: &TimedSystem, opts: &DotOptions) -> String {
    let members: Vec<(String, &EffectEndo)> = sys.steps().iter().map(|(t, e)| (t.to_string(), e)).collect();
    family_dot(sys.states(), sys.alphabet(), &members, opts)
}

/// DOT for one endo, with every edge tagged by `tag`.
pub fn endo_dot(states: &[String], alphabet: &[String], tag: &str, e: &EffectEndo, opts: &DotOptions) -> String {
    family_dot(states, alphabet, &[(tag.to_string(), e)], opts)
}

/// DOT for a family of endos indexed by printable monoid elements.
///
/// A state is double-circled when some member accepts there. Convex generators become
/// small point nodes fanning out to their support.
pub fn family_dot(states: &[String], alphabet: &[String], members: &[(String, &EffectEndo)], opts: &DotOptions) -> String {
    let label = |l: usize| if l == 0 { TAU.to_string() } else { alphabet[l - 1].clone() };
    let mut accepting = vec![false; states.len()];
    let mut body = String::new();
    let mut point = 0usize;
    for (tag, e) in members {
        match e {
            EffectEndo::Convex(c) => {
                for (x, name) in states.iter().enumerate() {
                    for g in c.generators(x) {
                        let p = format!("p{point}");
                        point += 1;
                        let _ = writeln!(body, "  {p} [shape=point];");
                        let _ = writeln!(body, "  {} -> {p} [label={}, arrowhead=none];", quote(name), quote(tag));
                        for (o, w) in g.iter() {
                            match o {
                                Outcome::Step { label: l, state } => {
                                    let text = format!("{},{} | {}", label(*l), tag, format_rational(w));
                                    let _ = writeln!(body, "  {p} -> {} [label={}];", quote(&states[*state]), quote(&text));
                                }
                                Outcome::Accept => accepting[x] = true,
                            }
                        }
                    }
                }
            }
            _ => {
                let dom = match e {
                    EffectEndo::Weighted(m) => Some(m.algebra().inner),
                    _ => None,
                };
                for (x, l, y, w) in e.matrix_steps() {
                    let mut text = format!("{},{}", label(l), tag);
                    if let Some(d) = dom {
                        let _ = write!(text, " | {}", d.format_weight(&w));
                    }
                    let _ = writeln!(body, "  {} -> {} [label={}];", quote(&states[x]), quote(&states[y]), quote(&text));
                }
                for (x, acc) in accepting.iter_mut().enumerate() {
                    if let Some(w) = e.accept_weight(x) {
                        let d = dom.unwrap_or(WeightDomain::Bool);
                        if !d.is_bottom(&w) {
                            *acc = true;
                        }
                    }
                }
            }
        }
    }
    let mut out = String::new();
    let name = opts.name.clone().unwrap_or_else(|| "system".into());
    let _ = writeln!(out, "digraph {} {{", quote(&name));
    let _ = writeln!(out, "  rankdir=LR;");
    for (x, s) in states.iter().enumerate() {
        let shape = if accepting[x] { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {} [shape={shape}];", quote(s));
    }
    out.push_str(&body);
    out.push_str("}\n");
    out
}
