//! Plain-text tables.

use std::fmt::Write;

use timedeq::effects::{Backend, Outcome};
use timedeq::rational::format_rational;
use timedeq::systems::TimedSystem;

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            widths[i] = widths[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                let pad = widths[i] - c.chars().count();
                let _ = write!(s, "{c}{}  ", " ".repeat(pad));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

/// One line per declared step, acceptance and generator.
pub fn system(sys: &TimedSystem) -> String {
    let names = sys.states();
    let mut out = format!("# {} states, backend {}\n", sys.len(), sys.backend());
    let weighted = matches!(sys.backend(), Backend::Weighted(_));
    for s in sys.raw_steps() {
        let _ = write!(out, "{} --{},{}--> {}", names[s.from], sys.label_name(s.label), s.dur, names[s.to]);
        if weighted {
            let _ = write!(out, "  [{}]", s.weight);
        }
        out.push('\n');
    }
    for a in sys.raw_accepts() {
        let _ = write!(out, "{} accepts at {}", names[a.state], a.dur);
        if weighted {
            let _ = write!(out, "  [{}]", a.weight);
        }
        out.push('\n');
    }
    for ((x, t), gens) in sys.raw_convex() {
        for g in gens {
            let parts: Vec<String> = g
                .iter()
                .map(|(o, w)| match o {
                    Outcome::Step { label, state } => {
                        format!("{} {}->{}", format_rational(w), sys.label_name(*label), names[*state])
                    }
                    Outcome::Accept => format!("{} accept", format_rational(w)),
                })
                .collect();
            let _ = writeln!(out, "{} --{}--> {{{}}}", names[*x], t, parts.join(", "));
        }
    }
    out
}
