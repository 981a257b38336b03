use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Read;

use serde_json::{json, Value};
use timedeq::algebra::CanonicalHom;
use timedeq::equivalence::{
    bisimilar, coarsest_bisimulation, language_equivalent, language_partition, point_name, spectrum, BisimVerdict,
    EdgeStatus, LangBound, LangMode, Partition, Semantics, Verdict,
};
use timedeq::markov::{self, MarkovChain, Method, Precision};
use timedeq::oracles::{self, OOut};
use timedeq::rational::format_rational;
use timedeq::saturation::{saturate_canonical, Bounds};
use timedeq::systems::{dump_dot, family_dot, load_system, DotOptions, TimedSystem};
use timedeq::timed_automata::{compile, parse_automaton};
use timedeq::{random, Error};

use crate::args::*;
use crate::render;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

/// Process outcome; the discriminant is the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Distinguished = 1,
    Bounded = 3,
}

pub struct Report {
    pub text: String,
    pub status: Status,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, status: Status::Success }
    }
}

type Res<T> = std::result::Result<T, CliError>;

fn read_input(input: &Input) -> Res<String> {
    let mut buf = String::new();
    match input.file.as_deref() {
        Some(p) if p.as_os_str() != "-" => {
            buf = std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|source| CliError::Io { path: "stdin".into(), source })?;
        }
    }
    Ok(buf)
}

fn read_system(input: &Input) -> Res<TimedSystem> {
    Ok(load_system(&read_input(input)?)?)
}

fn read_chain(input: &Input) -> Res<MarkovChain> {
    Ok(markov::parse_chain(&read_input(input)?)?)
}

fn state(sys: &TimedSystem, name: &str) -> Res<usize> {
    sys.state_index(name).ok_or_else(|| CliError::Usage(format!("unknown state '{name}'")))
}

fn chain_states(chain: &MarkovChain, names: &[String]) -> Res<BTreeSet<usize>> {
    names
        .iter()
        .map(|n| chain.state_index(n).ok_or_else(|| CliError::Usage(format!("unknown state '{n}'"))))
        .collect()
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn named_blocks(p: &Partition, names: &[String]) -> Value {
    json!(p.blocks().iter().map(|b| b.iter().map(|&x| names[x].clone()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn run(cli: Cli) -> Res<Report> {
    let fmt = cli.format;
    match cli.command {
        Command::Ta(TaCommand::Compile(a)) => ta_compile(a, fmt.unwrap_or(Format::Json)),
        Command::Saturate(a) => saturate(a, fmt.unwrap_or(Format::Json)),
        Command::Check(a) => check(a, fmt.unwrap_or(Format::Table)),
        Command::Spectrum(a) => run_spectrum(a, fmt.unwrap_or(Format::Table)),
        Command::Mc(McCommand::Lump(a)) => lump(a, fmt.unwrap_or(Format::Table)),
        Command::Mc(McCommand::Hit(a)) => hit(a, fmt.unwrap_or(Format::Table)),
        Command::Oracle(o) => oracle(o, fmt.unwrap_or(Format::Table)),
        Command::ExportDot(a) => {
            let sys = read_system(&a.input)?;
            Ok(Report::ok(dump_dot(&sys, &DotOptions { name: a.name })))
        }
    }
}

fn emit_system(sys: &TimedSystem, fmt: Format) -> String {
    match fmt {
        Format::Json => sys.to_json() + "\n",
        Format::Table => render::system(sys),
    }
}

fn ta_compile(a: CompileArgs, fmt: Format) -> Res<Report> {
    let ta = parse_automaton(&read_input(&a.input)?)?;
    let initial = if a.initial.is_empty() {
        ta.default_initial()
    } else {
        a.initial.iter().map(|s| ta.parse_initial(s)).collect::<timedeq::Result<Vec<_>>>()?
    };
    let sys = compile(&ta, a.t_max, &initial, a.budget)?;
    Ok(Report::ok(emit_system(&sys, fmt)))
}

fn saturate(a: SaturateArgs, fmt: Format) -> Res<Report> {
    let sys = read_system(&a.input)?;
    let bounds = if a.t_max.is_some() || a.depth.is_some() {
        let d = Bounds::defaults(&sys);
        Bounds::fixed(a.t_max.unwrap_or(d.t_max), a.depth.unwrap_or(d.depth))
    } else {
        Bounds::defaults(&sys)
    };
    let fam = saturate_canonical(&sys, a.hom.into(), &bounds)?;
    if !fam.conclusive() {
        eprintln!(
            "note: bounded saturation (t_max={}, depth={}); members past the bound are missing",
            fam.bounds.t_max, fam.bounds.depth
        );
    }
    let text = if a.dot {
        let members: Vec<(String, _)> = fam.members.iter().map(|(e, m)| (e.to_string(), m)).collect();
        family_dot(&fam.states, &fam.alphabet, &members, &DotOptions { name: Some("saturated".into()) })
    } else {
        emit_system(&fam.to_system()?, fmt)
    };
    Ok(Report::ok(text))
}

fn bisim_bounds(sys: &TimedSystem, b: BoundArgs) -> Bounds {
    let mut bounds = Bounds::defaults(sys);
    if let Some(t) = b.t_max {
        bounds.t_max = t;
    }
    if let Some(d) = b.depth {
        bounds.depth = d;
    }
    bounds
}

fn lang_bound(sys: &TimedSystem, b: BoundArgs) -> LangBound {
    let mut lb = LangBound::defaults(sys);
    if let Some(l) = b.len {
        lb.len = l;
    }
    if let Some(t) = b.t_max {
        lb.time = t;
    }
    lb
}

fn check(a: CheckArgs, fmt: Format) -> Res<Report> {
    let sys = read_system(&a.input)?;
    let hom: CanonicalHom = a.relation.into();
    let sem = match a.semantics {
        SemanticsArg::Bisim => "bisim",
        SemanticsArg::Lang => "lang",
    };
    let names = sys.states();
    if let Some(pair) = &a.pair {
        let (x, y) = (state(&sys, &pair[0])?, state(&sys, &pair[1])?);
        let (verdict, status, word) = match a.semantics {
            SemanticsArg::Bisim => {
                let fam = saturate_canonical(&sys, hom, &bisim_bounds(&sys, a.bounds))?;
                let p = coarsest_bisimulation(&fam);
                match bisimilar(&fam, &p, x, y) {
                    BisimVerdict::Equivalent => ("equivalent", Status::Success, None),
                    BisimVerdict::Distinguished => ("distinguished", Status::Distinguished, None),
                    BisimVerdict::BoundedEqual { .. } => ("bounded-equal", Status::Bounded, None),
                    BisimVerdict::BoundedDistinguished { .. } => ("bounded-distinguished", Status::Bounded, None),
                }
            }
            SemanticsArg::Lang => {
                let mode = LangMode::from_hom(hom);
                match language_equivalent(&sys, x, y, mode, &lang_bound(&sys, a.bounds))? {
                    Verdict::Equal => ("equivalent", Status::Success, None),
                    Verdict::BoundedEqual { .. } => ("bounded-equal", Status::Bounded, None),
                    Verdict::Distinguished { word } => ("distinguished", Status::Distinguished, Some(word.render(&sys))),
                    Verdict::BoundedDistinguished { word } => {
                        ("bounded-distinguished", Status::Bounded, Some(word.render(&sys)))
                    }
                }
            }
        };
        let text = match fmt {
            Format::Json => pretty(&json!({
                "relation": hom.key(),
                "semantics": sem,
                "pair": [names[x], names[y]],
                "verdict": verdict,
                "witness": word,
            })),
            Format::Table => {
                let mut s = format!("{} {} {}: {verdict}\n", hom.key(), sem, pair.join(" "));
                if let Some(w) = word {
                    let _ = writeln!(s, "witness: {w}");
                }
                s
            }
        };
        return Ok(Report { text, status });
    }
    let (partition, conclusive) = match a.semantics {
        SemanticsArg::Bisim => {
            let fam = saturate_canonical(&sys, hom, &bisim_bounds(&sys, a.bounds))?;
            (coarsest_bisimulation(&fam), fam.conclusive())
        }
        SemanticsArg::Lang => language_partition(&sys, LangMode::from_hom(hom), &lang_bound(&sys, a.bounds))?,
    };
    let text = match fmt {
        Format::Json => pretty(&json!({
            "relation": hom.key(),
            "semantics": sem,
            "blocks": named_blocks(&partition, names),
            "conclusive": conclusive,
        })),
        Format::Table => format!(
            "{} {}{}: {}\n",
            hom.key(),
            sem,
            if conclusive { "" } else { " (bounded)" },
            partition.render(names)
        ),
    };
    Ok(Report { text, status: if conclusive { Status::Success } else { Status::Bounded } })
}

fn run_spectrum(a: SpectrumArgs, fmt: Format) -> Res<Report> {
    let sys = read_system(&a.input)?;
    let report = spectrum(&sys, &bisim_bounds(&sys, a.bounds), &lang_bound(&sys, a.bounds))?;
    let names = sys.states();
    let status = if report.all_pass() { Status::Success } else { Status::Distinguished };
    let points: Vec<(CanonicalHom, Semantics)> = [Semantics::Bisim, Semantics::Lang]
        .into_iter()
        .flat_map(|s| CanonicalHom::ALL.into_iter().map(move |h| (h, s)))
        .collect();
    let edge_text = |st: &EdgeStatus| match st {
        EdgeStatus::Holds => "holds".to_string(),
        EdgeStatus::Violated { x, y } => format!("violated by {},{}", names[*x], names[*y]),
        EdgeStatus::Unchecked { reason } => format!("unchecked ({reason})"),
    };
    let text = match fmt {
        Format::Json => {
            let relations: Vec<Value> = points
                .iter()
                .map(|&p| match report.relation(p) {
                    Some(r) => json!({
                        "relation": point_name(p),
                        "blocks": named_blocks(&r.partition, names),
                        "conclusive": r.conclusive,
                    }),
                    None => json!({ "relation": point_name(p), "blocks": null, "reason": "no acceptance" }),
                })
                .collect();
            let edges: Vec<Value> = report
                .edges
                .iter()
                .map(|e| json!({ "finer": e.finer, "coarser": e.coarser, "status": edge_text(&e.status) }))
                .collect();
            pretty(&json!({ "relations": relations, "edges": edges, "all_pass": report.all_pass() }))
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|&p| match report.relation(p) {
                    Some(r) => vec![
                        point_name(p),
                        r.partition.num_blocks().to_string(),
                        if r.conclusive { "yes" } else { "bounded" }.into(),
                        r.partition.render(names),
                    ],
                    None => vec![point_name(p), "-".into(), "-".into(), "n/a (no acceptance)".into()],
                })
                .collect();
            let mut s = render::table(&["relation", "blocks", "conclusive", "partition"], &rows);
            s.push('\n');
            let rows: Vec<Vec<String>> = report
                .edges
                .iter()
                .map(|e| vec![e.finer.clone(), e.coarser.clone(), edge_text(&e.status)])
                .collect();
            s.push_str(&render::table(&["finer", "coarser", "status"], &rows));
            let bad = report.violations().count();
            let _ = writeln!(s, "hasse: {}", if bad == 0 { "all pass".to_string() } else { format!("{bad} violated") });
            s
        }
    };
    Ok(Report { text, status })
}

fn lump(a: LumpArgs, fmt: Format) -> Res<Report> {
    let chain = read_chain(&a.input)?;
    if !(a.tol >= 0.0) {
        return Err(CliError::Usage("--tol must be non-negative".into()));
    }
    let prec = if a.exact { Precision::Exact } else { Precision::Float { tol: a.tol } };
    let l = markov::coarsest_lumping(&chain, prec);
    let names = chain.states();
    let text = match fmt {
        Format::Json => pretty(&json!({
            "precision": if a.exact { "exact".to_string() } else { format!("float({})", a.tol) },
            "blocks": named_blocks(&l.partition, names),
            "rounds": l.rounds,
        })),
        Format::Table => {
            let rows: Vec<Vec<String>> = l
                .partition
                .blocks()
                .iter()
                .enumerate()
                .map(|(i, b)| vec![i.to_string(), b.iter().map(|&x| names[x].as_str()).collect::<Vec<_>>().join(",")])
                .collect();
            let mut s = render::table(&["block", "states"], &rows);
            let _ = writeln!(s, "rounds: {}", l.rounds);
            s
        }
    };
    Ok(Report::ok(text))
}

fn hit(a: HitArgs, fmt: Format) -> Res<Report> {
    let chain = read_chain(&a.input)?;
    let target = chain_states(&chain, &a.target)?;
    let method = match a.tol {
        Some(tol) => Method::ValueIteration { tol },
        None => Method::Exact,
    };
    let h = markov::hitting(&chain, &target, method)?;
    let vals = h.values.render();
    let names = chain.states();
    let text = match fmt {
        Format::Json => {
            let m: serde_json::Map<String, Value> =
                names.iter().zip(&vals).map(|(n, v)| (n.clone(), Value::String(v.clone()))).collect();
            pretty(&json!({ "target": a.target, "values": m, "iterations": h.iterations }))
        }
        Format::Table => {
            let rows: Vec<Vec<String>> = names.iter().zip(vals).map(|(n, v)| vec![n.clone(), v]).collect();
            render::table(&["state", "hitting"], &rows)
        }
    };
    Ok(Report::ok(text))
}

fn oracle(cmd: OracleCommand, fmt: Format) -> Res<Report> {
    match cmd {
        OracleCommand::WeakSteps(a) => {
            let sys = read_system(&a.input)?;
            let steps = oracles::rule_closure_weak_steps(&sys, a.t_max)?;
            let accepts = oracles::rule_closure_weak_accepts(&sys, a.t_max)?;
            let n = sys.states();
            let step_rows: Vec<Vec<String>> = steps
                .iter()
                .map(|&(x, l, t, y)| vec![n[x].clone(), sys.label_name(l).into(), t.to_string(), n[y].clone()])
                .collect();
            let acc_rows: Vec<Vec<String>> = accepts.iter().map(|&(x, t)| vec![n[x].clone(), t.to_string()]).collect();
            let text = match fmt {
                Format::Json => pretty(&json!({ "steps": step_rows, "accepts": acc_rows })),
                Format::Table => {
                    let mut s = render::table(&["from", "label", "time", "to"], &step_rows);
                    if !acc_rows.is_empty() {
                        s.push('\n');
                        s.push_str(&render::table(&["state", "accepts at"], &acc_rows));
                    }
                    s
                }
            };
            Ok(Report::ok(text))
        }
        OracleCommand::Weighted(a) => {
            let sys = read_system(&a.input)?;
            let w = oracles::brute_weighted_weak(&sys, a.t_max, a.depth)?;
            let n = sys.states();
            let step_rows: Vec<Vec<String>> = w
                .steps
                .iter()
                .map(|(&(x, l, t, y), v)| {
                    vec![n[x].clone(), sys.label_name(l).into(), t.to_string(), n[y].clone(), v.to_weight().to_string()]
                })
                .collect();
            let acc_rows: Vec<Vec<String>> =
                w.accepts.iter().map(|(&(x, t), v)| vec![n[x].clone(), t.to_string(), v.to_weight().to_string()]).collect();
            let text = match fmt {
                Format::Json => pretty(&json!({ "steps": step_rows, "accepts": acc_rows, "stable": w.stable })),
                Format::Table => {
                    let mut s = render::table(&["from", "label", "time", "to", "weight"], &step_rows);
                    if !acc_rows.is_empty() {
                        s.push('\n');
                        s.push_str(&render::table(&["state", "accepts at", "weight"], &acc_rows));
                    }
                    if !w.stable {
                        let _ = writeln!(s, "not stable at depth {}", a.depth);
                    }
                    s
                }
            };
            Ok(Report { text, status: if w.stable { Status::Success } else { Status::Bounded } })
        }
        OracleCommand::Convex(a) => {
            let sys = read_system(&a.input)?;
            let table = oracles::brute_convex_weak(&sys, a.t_max, a.depth)?;
            let n = sys.states();
            let dist = |d: &oracles::ODist| {
                let parts: Vec<String> = d
                    .iter()
                    .map(|(o, w)| match o {
                        OOut::Step(l, y) => format!("{} {}->{}", format_rational(w), sys.label_name(*l), n[*y]),
                        OOut::Accept => format!("{} accept", format_rational(w)),
                    })
                    .collect();
                format!("{{{}}}", parts.join(", "))
            };
            let rows: Vec<Vec<String>> = table
                .iter()
                .flat_map(|(&(x, t), gens)| gens.iter().map(move |g| (x, t, g)))
                .map(|(x, t, g)| vec![n[x].clone(), t.to_string(), dist(g)])
                .collect();
            let text = match fmt {
                Format::Json => pretty(&json!({ "generators": rows })),
                Format::Table => render::table(&["state", "time", "generator"], &rows),
            };
            Ok(Report::ok(text))
        }
        OracleCommand::Languages(a) => {
            let sys = read_system(&a.input)?;
            let x = state(&sys, &a.state)?;
            let mut bound = LangBound::defaults(&sys);
            if let Some(l) = a.len {
                bound.len = l;
            }
            if let Some(t) = a.time {
                bound.time = t;
            }
            let sample = oracles::brute_languages(&sys, x, a.mode.into(), &bound, a.depth)?;
            let rows: Vec<Vec<String>> =
                sample.words.iter().map(|(w, v)| vec![w.render(&sys), v.to_string()]).collect();
            let text = match fmt {
                Format::Json => pretty(&json!({ "words": rows, "exact": sample.exact })),
                Format::Table => render::table(&["word", "value"], &rows),
            };
            Ok(Report { text, status: if sample.exact { Status::Success } else { Status::Bounded } })
        }
        OracleCommand::Hitting(a) => {
            let chain = read_chain(&a.input)?;
            let target = chain_states(&chain, &a.target)?;
            if target.is_empty() {
                return Err(Error::EmptyTarget.into());
            }
            let start = *chain_states(&chain, std::slice::from_ref(&a.start))?.iter().next().expect("one state");
            if a.trials == 0 {
                return Err(CliError::Usage("--trials must be at least 1".into()));
            }
            let seed = random::seed_from_env(0);
            let mc = oracles::monte_carlo_hitting(&chain, &target, start, a.trials, a.horizon, seed);
            let text = match fmt {
                Format::Json => pretty(&json!({
                    "start": a.start, "trials": mc.trials, "hits": mc.hits,
                    "estimate": mc.estimate, "lo": mc.lo, "hi": mc.hi, "seed": seed,
                })),
                Format::Table => format!(
                    "{}: {:.6} in [{:.6}, {:.6}] ({} / {} hits, seed {seed})\n",
                    a.start, mc.estimate, mc.lo, mc.hi, mc.hits, mc.trials
                ),
            };
            Ok(Report::ok(text))
        }
    }
}
