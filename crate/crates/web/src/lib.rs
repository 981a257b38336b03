//! Browser bindings: saturate to DOT, the spectrum table, and Markov lumping.
//!
//! Each export takes the same JSON documents as the command line and returns a string or
//! throws the error message.

use serde_json::json;
use timedeq::algebra::CanonicalHom;
use timedeq::equivalence::{point_name, spectrum, EdgeStatus, LangBound, Semantics};
use timedeq::markov::{coarsest_lumping, parse_chain, Precision};
use timedeq::saturation::{saturate_canonical, Bounds};
use timedeq::systems::{family_dot, load_system, DotOptions};
use wasm_bindgen::prelude::*;

fn hom(key: &str) -> Result<CanonicalHom, String> {
    match key {
        "id" | "strong-timed" => Ok(CanonicalHom::StrongTimed),
        "abstract" | "strong-abstract" => Ok(CanonicalHom::StrongAbstract),
        "weak" | "weak-timed" => Ok(CanonicalHom::WeakTimed),
        "weak-abstract" => Ok(CanonicalHom::WeakAbstract),
        other => Err(format!("unknown homomorphism '{other}'")),
    }
}

/// DOT source for the saturated family of `system` along `hom_key`.
pub fn saturate_dot_str(system: &str, hom_key: &str) -> Result<String, String> {
    let sys = load_system(system).map_err(|e| e.to_string())?;
    let fam = saturate_canonical(&sys, hom(hom_key)?, &Bounds::defaults(&sys)).map_err(|e| e.to_string())?;
    let members: Vec<(String, _)> = fam.members.iter().map(|(e, m)| (e.to_string(), m)).collect();
    Ok(family_dot(&fam.states, &fam.alphabet, &members, &DotOptions { name: Some(hom_key.to_string()) }))
}

/// The eight relations and the refinement checks, as JSON.
pub fn spectrum_json_str(system: &str) -> Result<String, String> {
    let sys = load_system(system).map_err(|e| e.to_string())?;
    let report = spectrum(&sys, &Bounds::defaults(&sys), &LangBound::defaults(&sys)).map_err(|e| e.to_string())?;
    let names = sys.states();
    let mut rows = Vec::new();
    for sem in [Semantics::Bisim, Semantics::Lang] {
        for h in CanonicalHom::ALL {
            let p = (h, sem);
            rows.push(match report.relation(p) {
                Some(r) => json!({
                    "relation": point_name(p),
                    "partition": r.partition.render(names),
                    "conclusive": r.conclusive,
                }),
                None => json!({ "relation": point_name(p), "partition": null, "conclusive": null }),
            });
        }
    }
    let edges: Vec<_> = report
        .edges
        .iter()
        .map(|e| {
            let status = match &e.status {
                EdgeStatus::Holds => "holds".to_string(),
                EdgeStatus::Violated { x, y } => format!("violated by {},{}", names[*x], names[*y]),
                EdgeStatus::Unchecked { reason } => format!("unchecked ({reason})"),
            };
            json!({ "finer": e.finer, "coarser": e.coarser, "status": status })
        })
        .collect();
    Ok(json!({ "relations": rows, "edges": edges, "all_pass": report.all_pass() }).to_string())
}

/// Coarsest lumping of a chain document; `tol < 0` means exact arithmetic.
pub fn lump_json_str(chain: &str, tol: f64) -> Result<String, String> {
    let chain = parse_chain(chain).map_err(|e| e.to_string())?;
    let prec = if tol < 0.0 { Precision::Exact } else { Precision::Float { tol } };
    let l = coarsest_lumping(&chain, prec);
    let names = chain.states();
    let blocks: Vec<Vec<&str>> =
        l.partition.blocks().iter().map(|b| b.iter().map(|&x| names[x].as_str()).collect()).collect();
    Ok(json!({ "blocks": blocks, "rounds": l.rounds }).to_string())
}

#[wasm_bindgen]
pub fn saturate_dot(system: &str, hom: &str) -> Result<String, JsValue> {
    saturate_dot_str(system, hom).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spectrum_json(system: &str) -> Result<String, JsValue> {
    spectrum_json_str(system).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn lump_json(chain: &str, tol: f64) -> Result<String, JsValue> {
    lump_json_str(chain, tol).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use timedeq::fixtures::{CHAIN_SPLIT, FIG2, WT2};

    #[test]
    fn fig2_dot() {
        let dot = saturate_dot_str(FIG2, "weak-abstract").unwrap();
        assert!(dot.starts_with("digraph \"weak-abstract\""));
        assert!(dot.contains("\"s1\" -> \"s1\""));
    }

    #[test]
    fn wt2_spectrum() {
        let v: serde_json::Value = serde_json::from_str(&spectrum_json_str(WT2).unwrap()).unwrap();
        assert_eq!(v["all_pass"], true);
        assert_eq!(v["relations"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn lumping_both_modes() {
        let exact: serde_json::Value = serde_json::from_str(&lump_json_str(CHAIN_SPLIT, -1.0).unwrap()).unwrap();
        let float: serde_json::Value = serde_json::from_str(&lump_json_str(CHAIN_SPLIT, 1e-9).unwrap()).unwrap();
        assert_eq!(exact["blocks"], float["blocks"]);
    }

    #[test]
    fn errors_are_messages() {
        assert!(saturate_dot_str("{", "weak").is_err());
        assert!(saturate_dot_str(FIG2, "sideways").unwrap_err().contains("sideways"));
    }
}
